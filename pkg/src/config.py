"""
Commute-network modeling configuration.
All settings are read from environment variables with sensible defaults.
An optional .env file in the working directory is loaded first.
"""
import os

from dotenv import load_dotenv

load_dotenv()

# ── Reproducibility ───────────────────────────────────────────────────────────
DEFAULT_SEED = int(os.getenv("COMMUTE_SEED", "0"))
DEFAULT_SEEDS = [int(s) for s in os.getenv("COMMUTE_SEEDS", "0,1,2,3,4,5,6,7,8,9").split(",")]

# ── LODES schema (column names vary by vintage) ──────────────────────────────
LODES_WORK_COLUMN = os.getenv("COMMUTE_LODES_WORK_COLUMN", "w_geocode")
LODES_HOME_COLUMN = os.getenv("COMMUTE_LODES_HOME_COLUMN", "h_geocode")
LODES_COUNT_COLUMN = os.getenv("COMMUTE_LODES_COUNT_COLUMN", "S000")
DEFAULT_DELIMITER = os.getenv("COMMUTE_DELIMITER", ",")

# ── Graph ─────────────────────────────────────────────────────────────────────
WEIGHT_TRANSFORM = os.getenv("COMMUTE_WEIGHT_TRANSFORM", "log1p")
SYMMETRIZE = os.getenv("COMMUTE_SYMMETRIZE", "true").lower() in ("true", "1", "yes")

# ── Embeddings ────────────────────────────────────────────────────────────────
EMBEDDING_DIM = int(os.getenv("COMMUTE_EMBEDDING_DIM", "5"))
KMEANS_K = int(os.getenv("COMMUTE_KMEANS_K", "5"))
KMEANS_RESTARTS = int(os.getenv("COMMUTE_KMEANS_RESTARTS", "10"))
KMEANS_MAX_ITER = int(os.getenv("COMMUTE_KMEANS_MAX_ITER", "300"))
PAGERANK_TOL = float(os.getenv("COMMUTE_PAGERANK_TOL", "1e-10"))
PAGERANK_MAX_ITER = int(os.getenv("COMMUTE_PAGERANK_MAX_ITER", "10000"))

# ── Optimizer ─────────────────────────────────────────────────────────────────
OPTIMIZER = os.getenv("COMMUTE_OPTIMIZER", "adam")
LEARNING_RATE = float(os.getenv("COMMUTE_LR", "1e-3"))
ADAM_BETA1 = float(os.getenv("COMMUTE_ADAM_BETA1", "0.9"))
ADAM_BETA2 = float(os.getenv("COMMUTE_ADAM_BETA2", "0.999"))
ADAM_EPS = float(os.getenv("COMMUTE_ADAM_EPS", "1e-8"))

# ── Edge-reconstruction embedding ─────────────────────────────────────────────
VNN_EPOCHS = int(os.getenv("COMMUTE_VNN_EPOCHS", "200"))
VNN_BATCH_SIZE = int(os.getenv("COMMUTE_VNN_BATCH_SIZE", "4096"))
VNN_BALANCED_ABOVE = int(os.getenv("COMMUTE_VNN_BALANCED_ABOVE", "600"))
VNN_PATIENCE = int(os.getenv("COMMUTE_VNN_PATIENCE", "20"))
VNN_MIN_REL_IMPROVEMENT = float(os.getenv("COMMUTE_VNN_MIN_REL_IMPROVEMENT", "1e-4"))
VNN_INIT_NOISE = float(os.getenv("COMMUTE_VNN_INIT_NOISE", "0.1"))

# ── Supervised heads ──────────────────────────────────────────────────────────
HEAD_HIDDEN = [int(s) for s in os.getenv("COMMUTE_HEAD_HIDDEN", "32,64,32").split(",")]
HEAD_EPOCHS = int(os.getenv("COMMUTE_HEAD_EPOCHS", "500"))
HEAD_LR = float(os.getenv("COMMUTE_HEAD_LR", "1e-2"))

# ── Graph models ──────────────────────────────────────────────────────────────
GNN_HIDDEN = [int(s) for s in os.getenv("COMMUTE_GNN_HIDDEN", "64,16").split(",")]
GNN_HEAD_HIDDEN = [int(s) for s in os.getenv("COMMUTE_GNN_HEAD_HIDDEN", "32").split(",")]
GAT_HEADS = int(os.getenv("COMMUTE_GAT_HEADS", "4"))
GAT_NEGATIVE_SLOPE = float(os.getenv("COMMUTE_GAT_NEGATIVE_SLOPE", "0.2"))
GNN_EPOCHS = int(os.getenv("COMMUTE_GNN_EPOCHS", "300"))
GNN_LR = float(os.getenv("COMMUTE_GNN_LR", "1e-2"))

# ── Evaluation ────────────────────────────────────────────────────────────────
TRAIN_FRACTION = float(os.getenv("COMMUTE_TRAIN_FRACTION", "0.7"))
KFOLD_K = int(os.getenv("COMMUTE_KFOLD_K", "5"))
MIN_SPLIT_NODES = int(os.getenv("COMMUTE_MIN_SPLIT_NODES", "10"))
GRID_WORKERS = int(os.getenv("COMMUTE_GRID_WORKERS", str(os.cpu_count() or 1)))
CACHE_DB_PATH = os.getenv(
    "COMMUTE_CACHE_DB",
    os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "grid_cache.db"),
)
