"""sepscope: Minkowski-difference linear separability measures.

Library surface:

- dataset: labeled point sets, CSV/LSMX/LSMY formats, run manifests
- aggregates: closed-form difference-cloud statistics and pair counting
- measures: ls_star / ls0 / ls1 / ls2 and Fisher's quotient at a weight
- maxls: greedy separable subset extraction
- plm: random pseudo-linear layers and width/depth Monte-Carlo studies
- trainer: demo MLP with per-epoch, per-layer separability tracking
- cli: the sepscope command-line tool wiring it all together
"""

from .aggregates import (
    MdAggregates,
    PairStats,
    default_zero_tol,
    md_gram,
    md_sum,
    pair_stats_fast,
    pair_stats_naive,
    project,
)
from .dataset import (
    BinaryTask,
    LabeledDataset,
    RunManifest,
    binary_task,
    load_csv,
    load_labels,
    load_matrix_binary,
    subsample_probe,
    write_labels_binary,
    write_matrix_binary,
)
from .errors import (
    ConvergenceError,
    DataError,
    DegenerateError,
    FormatError,
    LabelError,
    ParseError,
    SepscopeError,
    ShapeError,
    SingularError,
    TrainingError,
    UnsupportedError,
)
from .linalg import gram_accumulate, power_iter_max_eig, solve_spd_ridge
from .maxls import (
    MaxLsResult,
    ViolationGraph,
    greedy_maxls,
    verify_result,
    verify_separable,
    violation_edges,
)
from .measures import (
    LdaStats,
    MeasureReport,
    MultiLsReport,
    WeightVector,
    approx_weight,
    exact_weight,
    j_omega_at,
    lda_stats,
    ls0_at,
    ls1_at,
    ls2_at,
    ls_star_at,
    measure_at,
    measure_task,
    multi_ls,
)
from .plm import (
    FlipCheck,
    PlmStack,
    act_apply,
    act_eval,
    apply_plm,
    depth_study,
    f_sigma,
    f_sigma_grid,
    flip_check,
    random_plm_stack,
    width_study,
)
from .trainer import (
    LayerMeasure,
    Mlp,
    MlpConfig,
    TrackSeries,
    make_synthetic,
    spearman,
    sync_correlation,
    track_manifest,
    train_mlp,
)

__version__ = "0.1.0"
