"""Application constants."""
# Process exit codes
EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

# Performance thresholds
SLOW_SOLVE_THRESHOLD_MS = 30000  # Log warnings for single channel/class solves > 30s
SLOW_CYCLE_THRESHOLD_MS = 60000  # Log warnings for outer cycles > 60s

# Concurrent channel / class solves
DEFAULT_MAX_WORKERS = 4

# Netpbm
NETPBM_MAXVAL = 255
NETPBM_GRAY_MAGIC = b"P5"
NETPBM_COLOR_MAGIC = b"P6"

# MNIST IDX
IDX_IMAGES_MAGIC = 0x00000803
IDX_LABELS_MAGIC = 0x00000801
MNIST_CLASSES = 10
MNIST_DESK_SIZE = 7000  # stratified subset for desk-scale classification runs
MNIST_DESK_BUDGETS = (70, 100, 50)  # 1%, then 10 and 5 labels per class
MNIST_FULL_BUDGETS = (700, 100, 50)

# Metrics
PSNR_INF_SENTINEL = "inf"
PSNR_PEAK = 255.0

# Run ids are the first hex digits of the config digest
RUN_ID_LENGTH = 12

# Synthetic two-blob dataset for `ssl --dataset blobs`
BLOBS_PER_CLASS = 50
BLOBS_CENTERS = ((0.0, 0.0), (10.0, 10.0))
BLOBS_SPREAD = 0.5
BLOBS_LABELS_PER_CLASS = 2
