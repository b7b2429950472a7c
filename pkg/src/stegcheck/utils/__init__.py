# flake8: noqa
#!/usr/bin/env python
# coding=utf-8
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
# limitations under the License

from . import logging
from . import tqdm as _tqdm  # _tqdm is the module
from ._errors import (
    CalibrationError,
    ConfigError,
    EmptyDatasetError,
    FeatureDimensionError,
    FingerprintMismatchError,
    ImageShapeError,
    LabelLengthError,
    MalformedHeaderError,
    ModelFormatError,
    NonFiniteFeatureError,
    OutputDirLockedError,
    PayloadCapacityError,
    PGMParseError,
    SingleClassError,
    StegcheckError,
    TrailingDataError,
    TruncatedPayloadError,
    UnlabeledDatasetError,
    UnmatchedFilesError,
    UnsupportedMagicError,
    UnsupportedMaxvalError,
    ZeroDimensionError,
)
from ._paths import filter_paths, list_images
from ._seeding import derive_seed, make_generator, split_seed
from ._validators import (
    StegValidationError,
    validate_rate,
    validate_seed,
    validate_stegcheck_args,
)
from .sha import fingerprint
from .tqdm import (
    are_progress_bars_disabled,
    disable_progress_bars,
    enable_progress_bars,
    tqdm,
)
