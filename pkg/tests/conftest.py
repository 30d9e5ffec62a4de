import warnings

import numpy as np
import pytest

import photonam as pn


def rel(a, b):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    den = max(np.linalg.norm(b.ravel()), 1e-300)
    return float(np.linalg.norm((a - b).ravel()) / den)


@pytest.fixture(scope="session")
def grid16():
    return pn.make_grid(16)


@pytest.fixture(scope="session")
def grid32():
    return pn.make_grid(32)


@pytest.fixture(scope="session")
def grid48():
    return pn.make_grid(48)


@pytest.fixture(scope="session")
def grid64():
    return pn.make_grid(64)


@pytest.fixture(scope="session")
def grid96():
    return pn.make_grid(96)


@pytest.fixture(scope="session")
def basis16(grid16):
    return pn.build_basis(grid16)


@pytest.fixture(scope="session")
def basis32(grid32):
    return pn.build_basis(grid32)


@pytest.fixture(scope="session")
def basis48(grid48):
    return pn.build_basis(grid48)


@pytest.fixture(scope="session")
def basis64(grid64):
    return pn.build_basis(grid64)


@pytest.fixture(scope="session")
def basis96(grid96):
    return pn.build_basis(grid96)


def smooth_state(grid, basis, seed=0, mix=(1.0, 0.6), m=0):
    """Stock smooth decaying state: off-axis, off-origin, sub-Nyquist."""
    rng = np.random.default_rng(seed)
    dk = grid.dk[0]
    n = grid.dims[0]
    # diagonal placement keeps every margin at >= 6 widths for n >= 48
    kc = (n / 4.0) * dk
    sig = max(2.0 * dk, n / 29.0 * dk)
    r0 = rng.uniform(-1.0, 1.0, 3)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return pn.gaussian_vortex(
            grid, basis, center=(kc, kc, kc), widths=sig, m=m,
            helicity=mix, r_offset=r0,
        )


@pytest.fixture()
def state48(grid48, basis48):
    return smooth_state(grid48, basis48, seed=3)
