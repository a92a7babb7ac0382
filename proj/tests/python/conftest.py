import os
import shutil

import pytest


@pytest.fixture(scope="session")
def qud_cli():
    path = os.environ.get("QUD_CLI") or shutil.which("qud")
    if not path:
        pytest.skip("qud binary not available")
    return path
