# flake8: noqa
# There's no way to ignore "F401 '...' imported but unused" warnings in this
# module, but to preserve other warnings. So, don't check this module at all.

# Copyright 2022-present, the stegcheck authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

# ***********
# vendored from https://github.com/scientific-python/lazy_loader
import importlib
import os
import sys


def _attach(package_name, submodules=None, submod_attrs=None):
    """Attach lazily loaded submodules, functions, or other attributes.

    Importing `stegcheck` stays cheap: numpy and scipy are only loaded when an
    attribute that needs them is first accessed.

    Args:
        package_name (`str`):
            Typically use `__name__`.
        submodules (`set`):
            List of submodules to attach.
        submod_attrs (`dict`):
            Dictionary of submodule -> list of attributes / functions.
            These attributes are imported as they are used.

    Returns:
        __getattr__, __dir__, __all__
    """
    submod_attrs = submod_attrs or {}
    submodules = set(submodules or [])

    attr_to_modules = {
        attr: mod for mod, attrs in submod_attrs.items() for attr in attrs
    }

    __all__ = list(submodules | attr_to_modules.keys())

    def __getattr__(name):
        if name in submodules:
            return importlib.import_module(f"{package_name}.{name}")
        elif name in attr_to_modules:
            submod = importlib.import_module(f"{package_name}.{attr_to_modules[name]}")
            attr = getattr(submod, name)

            # Attribute and module sharing a name: the package exposes the attribute.
            if name == attr_to_modules[name]:
                pkg = sys.modules[package_name]
                pkg.__dict__[name] = attr

            return attr
        else:
            raise AttributeError(f"No {package_name} attribute {name}")

    def __dir__():
        return __all__

    if os.environ.get("EAGER_IMPORT", ""):
        for attr in set(attr_to_modules.keys()) | submodules:
            __getattr__(attr)

    return __getattr__, __dir__, list(__all__)


# ************

__version__ = "0.1.0"


__getattr__, __dir__, __all__ = _attach(
    __name__,
    submodules=[],
    submod_attrs={
        "constants": [
            "ALGORITHM_HILL",
            "ALGORITHM_LSBM",
            "CLASS_C_A",
            "CLASS_D_B",
            "CLASS_S_A",
            "CLASS_S_B",
            "LABEL_COVER",
            "LABEL_STEGO",
        ],
        "image_core": [
            "ImageGray",
            "RealPlane",
            "convolve2d",
            "load_pgm",
            "mirror_pad",
            "read_pgm",
            "save_pgm",
            "write_pgm",
        ],
        "synth_corpus": [
            "SourceParams",
            "generate_corpus",
            "generate_cover",
            "get_preset",
            "load_presets",
        ],
        "embedding": [
            "ChangeProbMap",
            "ChangeStats",
            "CostMap",
            "EmbedConfig",
            "calibrate_lambda",
            "change_probabilities",
            "count_changes",
            "embed",
            "embed_adaptive",
            "embed_lsbm",
            "hill_cost",
        ],
        "features": [
            "FeatureConfig",
            "FeatureVector",
            "compute_residual",
            "cooccurrence",
            "extract_features",
            "extract_features_batch",
            "read_feature_csv",
            "write_feature_csv",
        ],
        "ensemble": [
            "EcConfig",
            "EnsembleModel",
            "load_model",
            "oob_error",
            "predict",
            "predict_batch",
            "predict_votes",
            "save_model",
            "search_subspace_dim",
            "train_ensemble",
            "train_fld",
        ],
        "detector": [
            "DatasetPair",
            "DetectionReport",
            "DetectorModels",
            "ImageVerdict",
            "analyze",
            "build_test_pair",
            "build_train_pair",
            "classification_error",
            "filter_f1",
            "filter_f2",
            "load_detectors",
            "predicted_error",
            "reliable_predictions",
            "save_detectors",
            "summarize",
            "train_detectors",
        ],
        "harness": [
            "ExperimentConfig",
            "ExperimentResult",
            "load_experiment_config",
            "parse_experiment_config",
            "run_experiment",
        ],
        "utils": [
            "logging",
            "StegcheckError",
            "derive_seed",
            "disable_progress_bars",
            "enable_progress_bars",
        ],
    },
)
