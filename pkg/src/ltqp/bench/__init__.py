"""Benchmark harness: environment generator, server, oracle, workload and matrix runner."""
