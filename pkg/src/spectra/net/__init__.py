from .data import Dataset, generate_blobs, read_cifar10_batch, read_dataset_csv, write_dataset_csv
from .network import (
    CROSS_ENTROPY,
    MSE_AFTER_SOFTMAX,
    Forward,
    InitScheme,
    NetSpec,
    backward,
    forward,
    init_network,
    logits_gradient,
    loss_value,
    one_hot,
)
from .softmax import (
    log_softmax_with_temperature,
    per_sample_cross_entropy,
    softmax_columns,
    softmax_rows,
    softmax_with_temperature,
)
from .train import Snapshot, TrainConfig, TrainTrace, diagnostic_indices, evaluate, shuffle_order, train
