from hankeldyn.hankel import HankelOperator, CirculantEmbedding, FlopCounter
from hankeldyn.bestfit import FitProblem, FitResult, fit_operator, svt
from hankeldyn.dynsys import (
    OdeModel, Trajectory, TrajectoryDataset, Environment, Standardizer,
    integrate, generate_lorenz_dataset, generate_lv_dataset)
from hankeldyn.stnn import StnnConfig, StnnParams
from hankeldyn.ffnn import FfnnConfig, FfnnParams
from hankeldyn.dmd import DmdModel, dmd_fit
from hankeldyn.sindy import SindyModel, sindy_fit, sindy_simulate
from hankeldyn.havok import HavokModel, havok_fit, havok_predict
from hankeldyn.lm import LMSettings, TrainReport
from hankeldyn.config import ExperimentConfig
from hankeldyn.errors import (
    HankelDynError, NotPowerOfTwoError, ConvergenceError, SingularSystemError,
    IntegrationError, TrainingError, SparsityError, ConfigError, StageError)

# Version
from hankeldyn.version import __version__
