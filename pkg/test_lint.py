"""
Static checks: pyflakes errors across the tree and bandit findings in the package.
"""

import glob
import os

os.environ["LOG_LEVEL"] = "ERROR"

from bandit.core import config as bandit_config
from bandit.core import constants as bandit_constants
from bandit.core import manager as bandit_manager
from flake8.api import legacy as flake8

ROOT = os.path.dirname(os.path.abspath(__file__))


def test_no_pyflakes_errors():
    print("=" * 60)
    print("TEST: No unused imports or undefined names")
    print("=" * 60)
    paths = [os.path.join(ROOT, "app")] + sorted(glob.glob(os.path.join(ROOT, "test_*.py")))
    guide = flake8.get_style_guide(select=["F"], exclude=["examples", "runs"])
    report = guide.check_files(paths)
    assert report.total_errors == 0
    print("   ✅ PASSED")


def test_no_medium_bandit_findings():
    print("\nTEST: Bandit finds nothing of medium severity in app/")
    mgr = bandit_manager.BanditManager(bandit_config.BanditConfig(), "file")
    mgr.discover_files([os.path.join(ROOT, "app")], True)
    mgr.run_tests()
    issues = mgr.get_issue_list(sev_level=bandit_constants.MEDIUM, conf_level=bandit_constants.MEDIUM)
    for issue in issues:
        print(f"   {issue.fname}:{issue.lineno} {issue.test_id} {issue.text}")
    assert not issues
    print("   ✅ PASSED")


if __name__ == "__main__":
    test_no_pyflakes_errors()
    test_no_medium_bandit_findings()
