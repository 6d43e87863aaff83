"""
Experiment configuration.

An :class:`ExperimentConfig` fully determines an experiment: together
with the code version it fixes every number written to `metrics.csv`.
"""
import dataclasses
import hashlib
import json
from typing import Optional, Tuple

from hankeldyn.dynsys import DEFAULT_ENVIRONMENT_SEED
from hankeldyn.errors import ConfigError
from hankeldyn.stnn import DEFAULT_ACTIVATIONS, DEFAULT_ALPHA

SYSTEMS = ("lorenz", "lotka_volterra")
MODELS = ("stnn", "ffnn", "dmd", "sindy", "havok")


@dataclasses.dataclass(frozen=True)
class ExperimentConfig(object):
    '''Settings of one experiment, at desk scale by default.

    Use :meth:`full_scale` for the 100-trajectory, 20-epoch protocol.
    '''

    system: str = "lorenz"
    model: str = "stnn"
    seed: int = 0

    # Lorenz dataset
    n_traj: int = 10
    noise_mag: float = 1.0
    dt: float = 0.01
    T: float = 8.0
    tol: float = 1e-12
    method: str = "RK45"
    train_frac: float = 0.8
    split_seed: int = 0

    # Lotka-Volterra dataset
    n_envs: int = 10
    env_seed: int = DEFAULT_ENVIRONMENT_SEED
    n_train_traj: int = 8
    n_test_traj: int = 32
    lv_dt: float = 0.5
    lv_points: int = 20

    # Networks
    p: int = 6
    activations: Tuple[str, ...] = DEFAULT_ACTIVATIONS
    alpha: Tuple[float, ...] = DEFAULT_ALPHA
    hidden: Tuple[int, ...] = (30, 30, 30)
    standardize: bool = True
    # Train on the standardized increment x' - x rather than on x'.
    predict_increment: bool = True

    # Levenberg-Marquardt
    epochs: int = 5
    batch_size: int = 1000
    damping: float = 1e-3
    damping_up: float = 10.0
    damping_down: float = 0.1
    steps_per_batch: int = 10
    # Epochs without validation progress before stopping; None disables.
    patience: Optional[int] = 3

    # Classical baselines
    dmd_rank: Optional[int] = None
    sindy_threshold: float = 0.1
    sindy_max_iter: int = 10
    havok_q: int = 100
    havok_r: int = 15
    havok_coordinate: int = 0

    # Evaluation
    rollout_steps: int = 500
    n_eval_trajectories: int = 1
    eval_seed: int = 12345
    eval_noise: float = 1.0
    timing_calls: int = 1000
    timing_warmup: int = 100

    def validate(self):
        '''
        Raises:
            hankeldyn.errors.ConfigError: If a setting is out of range.
        '''
        if self.system not in SYSTEMS:
            raise ConfigError("Unknown system '%s', expecting one of %s"
                              % (self.system, ", ".join(SYSTEMS)))
        if self.model not in MODELS:
            raise ConfigError("Unknown model '%s', expecting one of %s"
                              % (self.model, ", ".join(MODELS)))
        if self.system == "lotka_volterra" and self.model in ("sindy", "havok"):
            raise ConfigError("Model '%s' is only run on the Lorenz system" % self.model)
        positive = ("n_traj", "dt", "T", "tol", "n_envs", "n_train_traj", "lv_dt",
                    "lv_points", "p", "epochs", "batch_size", "damping",
                    "steps_per_batch", "havok_q", "havok_r", "rollout_steps",
                    "n_eval_trajectories", "timing_calls")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ConfigError("%s must be positive, got %r" % (name, getattr(self, name)))
        if not 0 < self.train_frac < 1:
            raise ConfigError("train_frac must be in (0, 1)")
        if self.noise_mag < 0 or self.eval_noise < 0 or self.sindy_threshold < 0:
            raise ConfigError("Noise magnitudes and thresholds must be non-negative")
        if len(self.activations) != 4 or len(self.alpha) != 4:
            raise ConfigError("Need four activations and four alphas")
        if len(self.hidden) + 1 != len(self.activations) or min(self.hidden) < 1:
            raise ConfigError("hidden must hold %d positive widths, one per "
                              "activation but the last" % (len(self.activations) - 1))
        if any(a < 0 for a in self.alpha):
            raise ConfigError("alpha entries must be non-negative")
        if self.havok_r > self.havok_q:
            raise ConfigError("havok_r must not exceed havok_q")
        if self.dmd_rank is not None and self.dmd_rank < 1:
            raise ConfigError("dmd_rank must be positive")
        if self.patience is not None and self.patience < 1:
            raise ConfigError("patience must be positive")
        width = 3 if self.system == "lorenz" else 2
        if not 0 <= self.havok_coordinate < width:
            raise ConfigError("havok_coordinate must be in [0, %d)" % width)
        if self.timing_warmup < 0 or self.n_test_traj < 0:
            raise ConfigError("timing_warmup and n_test_traj must be non-negative")
        return self

    def to_dict(self):
        d = dataclasses.asdict(self)
        for key in ("activations", "alpha", "hidden"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, d):
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - names)
        if unknown:
            raise ConfigError("Unknown configuration keys: %s" % ", ".join(unknown))
        d = dict(d)
        for key in ("activations", "alpha", "hidden"):
            if key in d:
                d[key] = tuple(d[key])
        try:
            return cls(**d).validate()
        except TypeError as e:
            raise ConfigError(str(e))

    @classmethod
    def from_json(cls, path):
        try:
            with open(path) as f:
                doc = json.load(f)
        except (IOError, OSError, ValueError) as e:
            raise ConfigError("Cannot read configuration %s: %s" % (path, e))
        return cls.from_dict(doc)

    def to_json(self, path):
        with open(path, "w") as f:
            f.write(self.canonical_json())
            f.write("\n")

    def canonical_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def replace(self, **overrides):
        '''A validated copy with some settings changed.'''
        unknown = sorted(set(overrides) - {f.name for f in dataclasses.fields(self)})
        if unknown:
            raise ConfigError("Unknown configuration keys: %s" % ", ".join(unknown))
        return dataclasses.replace(self, **overrides).validate()

    def config_hash(self):
        '''Short SHA1 of the canonical JSON form.'''
        return hashlib.sha1(self.canonical_json().encode("utf-8")).hexdigest()[:12]

    def full_scale(self):
        '''The full protocol: 100 trajectories and 20 epochs.'''
        return self.replace(n_traj=100, epochs=20)
