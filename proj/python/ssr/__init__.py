"""Joint measurement-matrix and sparse-support-recovery design toolkit.

The heavy lifting lives in the compiled extension module ``ssr._core``;
this package re-exports its public surface.
"""

from ._core import (  # noqa: F401
    ActivityCase,
    Checkpoint,
    Dataset,
    DatasetBundle,
    DatasetSizes,
    DecoderParams,
    EpochRecord,
    Rng,
    ScenarioConfig,
    SolveResult,
    ThresholdCalibration,
    TrainConfig,
    TrainedModel,
    TrainLog,
    __version__,
    amp_solve,
    build_datasets,
    calibrate_threshold,
    complex_matvec,
    decoder_forward,
    detect,
    encoder_forward,
    error_rate,
    gen_sample,
    group_lasso_solve,
    hard_threshold,
    lasso_solve,
    load_checkpoint,
    magnitude_support,
    project_pilot_power,
    read_dataset,
    save_checkpoint,
    sparse_group_lasso_solve,
    support_of,
    train,
    write_dataset,
)
