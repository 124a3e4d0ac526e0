#!/usr/bin/env python3

import argparse
import importlib
import os
import sys

import testtools

PROJECT_DIR = os.path.join(os.path.dirname(os.path.realpath(__file__)), os.path.pardir)
sys.path.append(PROJECT_DIR)

MODULES = ["units", "chameleon", "forces", "optomech", "exclusion", "cli"]
# CliRunner swaps the process-wide stdout and stderr, so these suites run alone
SERIAL_MODULES = ["cli"]


# https://stackoverflow.com/questions/22484805/a-simple-working-example-for-testtools-concurrentstreamtestsuite  # noqa: E501
class TracingStreamResult(testtools.StreamResult):
    all_correct: bool

    def __init__(self):
        super().__init__()
        self.all_correct = True
        self.output = {}

    def status(self, *args, **kwargs):
        test_id, test_status = kwargs["test_id"], kwargs["test_status"]
        self.all_correct = self.all_correct and (
            test_status in ["inprogress", "success", "skip", None]
        )
        if not test_status:
            if test_id not in self.output:
                self.output[test_id] = b""
            self.output[test_id] += kwargs.get("file_bytes") or b""
        elif test_status in ["fail", "uxsuccess"]:
            print("{0}: {1}".format(test_id, test_status))
            print("{0}: {1}".format(test_id, self.output.get(test_id, b"").decode()))
        elif test_status == "success":
            print("{0}: {1}".format(test_id, test_status))


def run(modules, result: TracingStreamResult):
    suites = [(importlib.import_module(f"{name}.suite").suite(), name) for name in modules]
    concurrent_suite = testtools.ConcurrentStreamTestSuite(lambda: iter(suites))
    concurrent_suite.run(result)


def main():
    parser = argparse.ArgumentParser(description="Run tests.")
    parser.add_argument("--module", choices=MODULES, nargs="+", default=MODULES)
    args = parser.parse_args()

    sys.path.append(os.path.dirname(os.path.realpath(__file__)))
    result = TracingStreamResult()
    result.startTestRun()
    run([m for m in args.module if m not in SERIAL_MODULES], result)
    for module in (m for m in args.module if m in SERIAL_MODULES):
        run([module], result)
    result.stopTestRun()
    sys.exit(not result.all_correct)


if __name__ == "__main__":
    main()
