"""Invoke tasks for building, linting, testing and certifying klconc.

Defaults live in the `klconc` namespace below; override them in invoke.yml (see invoke.example.yml)
or with INVOKE_KLCONC_<NAME> environment variables.
"""

from invoke import Collection, task as invoke_task

namespace = Collection("klconc")
namespace.configure(
    {
        "klconc": {
            "package": "klconc",
            "verify_threads": 1,
            "verify_output": "verify-report.json",
        }
    }
)


def task(function=None, *args, **kwargs):
    """Wrap invoke.task so that every decorated function is also registered in the klconc namespace."""

    def register(function=None):
        """Create the invoke task and add it to the namespace."""
        created = invoke_task(*args, **kwargs)(function) if (args or kwargs) else invoke_task(function)
        namespace.add_task(created)
        return created

    # Bare @task passes the function directly; @task(help=...) passes it on the second call.
    if function:
        return register(function)
    return register


def run_command(context, command, **kwargs):
    """Echo a shell command, then run it in the current (poetry) environment."""
    print(f'Running "{command}"')
    return context.run(command, **kwargs)


# ------------------------------------------------------------------------------
# PACKAGING AND DOCS
# ------------------------------------------------------------------------------
@task
def generate_packages(context):
    """Build the sdist and wheel into dist/."""
    run_command(context, "poetry build")


@task
def docs(context):
    """Serve the mkdocs site on the dev address from mkdocs.yml, rebuilding on change."""
    run_command(context, "mkdocs serve -v")


# ------------------------------------------------------------------------------
# CERTIFICATION
# ------------------------------------------------------------------------------
@task(
    help={
        "prop": "check only this property (default: the whole catalogue)",
        "threads": "worker threads for enumeration and sampling",
    }
)
def verify(context, prop="", threads=None):
    """Certify the property catalogue on the default grid; exits 3 if any property fails."""
    threads = threads or context.klconc.verify_threads
    command = f"klconc verify --threads {threads} --output {context.klconc.verify_output} --annotate"
    if prop:
        command += f" --property {prop}"
    run_command(context, command)


# ------------------------------------------------------------------------------
# LINTERS
# ------------------------------------------------------------------------------
@task(help={"autoformat": "rewrite files in place instead of only reporting a diff"})
def black(context, autoformat=False):
    """Check (or apply) Black formatting."""
    flags = "" if autoformat else " --check --diff"
    run_command(context, f"black{flags} .")


@task
def flake8(context):
    """Run flake8 with the repository's .flake8 settings."""
    run_command(context, "flake8 . --config .flake8")


@task
def pylint(context):
    """Run pylint on the package using the [tool.pylint] tables of pyproject.toml."""
    run_command(context, f"pylint --rcfile pyproject.toml {context.klconc.package}")


@task
def pydocstyle(context):
    """Validate docstrings against .pydocstyle.ini."""
    run_command(context, "pydocstyle --config=.pydocstyle.ini .")


@task
def bandit(context):
    """Static security scan of the package sources."""
    run_command(context, "bandit --recursive . --configfile .bandit.yml")


@task
def yamllint(context):
    """Lint the YAML files (mkdocs.yml, invoke configs, lint configs)."""
    run_command(context, "yamllint . --format standard")


# ------------------------------------------------------------------------------
# UNIT TESTS
# ------------------------------------------------------------------------------
@task(
    help={
        "label": "test file, directory or node id to run instead of the whole suite",
        "failfast": "stop at the first failing test",
    }
)
def unittest(context, label="", failfast=False):
    """Run the unit tests under coverage."""
    command = "coverage run --module pytest"
    if label:
        command += f" {label}"
    if failfast:
        command += " --exitfirst"
    run_command(context, command)


@task
def unittest_coverage(context):
    """Print the coverage of the package measured by the last `invoke unittest`."""
    run_command(context, f"coverage report --skip-covered --include '{context.klconc.package}/*'")


@task(help={"failfast": "stop at the first failing test"})
def tests(context, failfast=False):
    """Run every linter, then the unit tests, then the coverage report."""
    for linter in (black, flake8, bandit, pydocstyle, pylint, yamllint):
        print(f"Running {linter.name}...")
        linter(context)
    print("Running unit tests...")
    unittest(context, failfast=failfast)
    print("All checks passed.")
    unittest_coverage(context)
