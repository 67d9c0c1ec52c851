"""Pytest configuration and fixtures."""
import os
import sys
from pathlib import Path
from typing import Callable, Optional

import numpy as np
import pytest

# Add app to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from app.models.domain import ImageBuffer, PointCloud, SparseWeightGraph
from app.models.requests import SolverOptions
from app.services.netpbm import read_image
from app.services.point_graph import build_weight_graph
from tests.helpers import graph_from_dense, piecewise_constant_image

# Allure integration
try:
    import allure
    ALLURE_AVAILABLE = True
except ImportError:
    ALLURE_AVAILABLE = False
    # Create a mock allure module for when it's not installed
    class MockAllure:
        @staticmethod
        def step(text):
            class _Step:
                def __enter__(self):
                    return self

                def __exit__(self, *exc):
                    return False

                def __call__(self, func):
                    return func
            return _Step()
        
        @staticmethod
        def tag(*tags):
            def decorator(func):
                return func
            return decorator
        
        @staticmethod
        def feature(feature):
            def decorator(func):
                return func
            return decorator
        
        @staticmethod
        def story(story):
            def decorator(func):
                return func
            return decorator
        
        class attachment_type:
            JSON = "application/json"
            TEXT = "text/plain"
        
        @staticmethod
        def attach(body, name, attachment_type):
            pass
    
    allure = MockAllure()


# =============================================================================
# Solver Fixtures
# =============================================================================

@pytest.fixture
def tight_options() -> SolverOptions:
    """Solver options tight enough for comparisons against dense oracles."""
    return SolverOptions(cg_tol=1e-13, cg_max_iters=10000, max_bregman_iters=50)


# =============================================================================
# Graph Fixtures
# =============================================================================

@pytest.fixture
def random_graph() -> Callable[..., SparseWeightGraph]:
    """Factory for kNN graphs on Gaussian point clouds."""

    def _build(n: int = 30, k: int = 5, r_sigma: Optional[int] = None, d: int = 3, seed: int = 0):
        rng = np.random.default_rng(seed)
        cloud = PointCloud(rng.standard_normal((n, d)))
        return build_weight_graph(cloud, k, r_sigma or max(1, k // 2))

    return _build


@pytest.fixture
def path_graph() -> SparseWeightGraph:
    """0 - 1 - 2 with unit weights in both directions."""
    return graph_from_dense([[0, 1, 0], [1, 0, 1], [0, 1, 0]])


# =============================================================================
# Image Fixtures
# =============================================================================

@pytest.fixture
def gray_image() -> ImageBuffer:
    return ImageBuffer(piecewise_constant_image(16, 1))


@pytest.fixture
def color_image() -> ImageBuffer:
    return ImageBuffer(piecewise_constant_image(16, 3))


@pytest.fixture
def image_dir(tmp_path: Path) -> Path:
    directory = tmp_path / "images"
    directory.mkdir()
    return directory


DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def camera_crop() -> ImageBuffer:
    """64x64 gray crop (face and camera) of the cameraman test image."""
    return read_image(DATA_DIR / "camera_64.pgm")


@pytest.fixture(scope="session")
def astronaut_crop() -> ImageBuffer:
    """64x64 color crop (suit and mission patch) of the astronaut test image."""
    return read_image(DATA_DIR / "astronaut_64.ppm")


# =============================================================================
# MNIST
# =============================================================================

@pytest.fixture(scope="session")
def mnist_dir() -> Path:
    """Directory with the MNIST IDX files; tests marked mnist skip without MNIST_DIR."""
    value = os.getenv("MNIST_DIR")
    if not value:
        pytest.skip("MNIST_DIR is not set")
    return Path(value).expanduser()


# =============================================================================
# Allure Hooks
# =============================================================================

@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    """Attach test results to Allure."""
    outcome = yield
    rep = outcome.get_result()
    
    if ALLURE_AVAILABLE and rep.when == "call":
        if rep.failed:
            # Attach error details
            if hasattr(rep, "longrepr") and rep.longrepr:
                allure.attach(
                    str(rep.longrepr),
                    name="Test Failure",
                    attachment_type=allure.attachment_type.TEXT
                )


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    """Log test setup in Allure."""
    if ALLURE_AVAILABLE:
        # Attach test configuration
        config_info = {
            "test_name": item.name,
            "test_file": str(item.fspath),
            "markers": [mark.name for mark in item.iter_markers()],
        }
        allure.attach(
            str(config_info),
            name="Test Configuration",
            attachment_type=allure.attachment_type.JSON
        )


@pytest.hookimpl(tryfirst=True)
def pytest_configure(config):
    """Configure Allure environment."""
    if ALLURE_AVAILABLE:
        # Create allure-results directory if it doesn't exist
        allure_dir = Path("allure-results")
        allure_dir.mkdir(exist_ok=True)
        
        # Attach environment information
        env_info = {
            "python_version": sys.version,
            "pytest_version": pytest.__version__,
            "test_path": str(Path.cwd()),
        }
        allure.attach(
            str(env_info),
            name="Environment",
            attachment_type=allure.attachment_type.JSON
        )

