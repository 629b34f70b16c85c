"""Lossless compact text encoding of 3D molecules, with compression,
chemistry-metric and reward utilities."""

from rcmt.analysis import CompressionReport, CorpusSummary, corpus_stats, measure, theoretical_bound
from rcmt.codec import decode, encode, quantize, roundtrip_report
from rcmt.errors import DecodeError, GraphError, RcmtError, SdfParseError
from rcmt.metrics import (
    MetricsReport,
    StabilityMode,
    ValenceTable,
    atom_stable,
    batch_metrics,
    is_valid,
    molecule_stable,
)
from rcmt.molgraph import (
    Atom,
    Bond,
    BondOrder,
    MolecularGraph,
    QuantizedCoord,
    bond_matrix,
    canonical_hash,
    valence_sum,
)
from rcmt.reward import (
    EnergyOracle,
    HarmonicOracle,
    RewardBreakdown,
    RewardWeights,
    Thermostat,
    atomic_stability_score,
    diversity,
    molecular_stability_score,
    policy_step,
    ppo_clip_objective,
    reward,
)
from rcmt.sdf import SdfRecord, parse_sdf, write_sdf

__version__ = "0.1.0"
