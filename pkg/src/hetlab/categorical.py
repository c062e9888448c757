"""Representational heterogeneity over categorical latent spaces.

Observations are mapped to soft category assignments (one distribution per
point); heterogeneity of a sample is then the pooled/within/between
decomposition of those assignment rows.
"""

from __future__ import annotations

import numpy as np

from .core import renyi_heterogeneity
from .decomposition import DecompositionResult, SubsystemEnsemble, decompose


class SoftAssignmentBatch(SubsystemEnsemble):
    """N soft category assignments (rows) with observation weights.

    Structurally identical to a subsystem ensemble: each row is the
    assignment distribution of one observation over the latent categories.
    """

    @property
    def n_points(self) -> int:
        return self.n_subsystems

    @property
    def n_categories(self) -> int:
        return self.n_states

    @property
    def assignments(self) -> np.ndarray:
        return self.table


def point_heterogeneity(row, q) -> float:
    """Effective number of latent categories for one observation.

    1 means a certain assignment; n_z means maximal uncertainty.
    """
    return renyi_heterogeneity(row, q)


def rrh_decompose(batch: SoftAssignmentBatch, q) -> DecompositionResult:
    """Pooled/within/between heterogeneity of a batch of soft assignments."""
    return decompose(batch, q)
