# Copyright 2026 The qtf Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Probabilistic transformations of quantum state sets."""

from ._core import (
    QtfError,
    check_deterministic,
    check_pure_feasible,
    fidelity,
    gram,
    optimize,
    purification_overlap_search,
    run_cli,
    simulate,
    synthesize,
    two_state_bound,
)

__all__ = [
    "QtfError",
    "check_deterministic",
    "check_pure_feasible",
    "fidelity",
    "gram",
    "optimize",
    "purification_overlap_search",
    "run_cli",
    "simulate",
    "synthesize",
    "two_state_bound",
]
