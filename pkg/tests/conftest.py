"""Shared test wiring."""

import pytest
import structlog


@pytest.fixture(autouse=True)
def _restore_structlog_config():
    """Undo any structlog.configure() done by a test.

    The CLI binds sys.stderr when it configures logging; under pytest that is
    a per-test capture stream that is closed once the test ends.
    """
    saved = structlog.get_config()
    yield
    structlog.configure(**saved)
