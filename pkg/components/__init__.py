"""
Experiment components for Trotter Error Statistics Toolkit.
"""

from components import joint_lc, kurtosis_vs_magic, long_time, resource_growth, variance_vs_time

EXPERIMENT_MODULES = {
    'variance_vs_time': variance_vs_time,
    'kurtosis_vs_magic': kurtosis_vs_magic,
    'joint_lc': joint_lc,
    'resource_growth': resource_growth,
    'long_time': long_time,
}

EXPERIMENT_RUNNERS = {
    'variance_vs_time': variance_vs_time.run_variance_vs_time,
    'kurtosis_vs_magic': kurtosis_vs_magic.run_kurtosis_vs_magic,
    'joint_lc': joint_lc.run_joint_lc,
    'resource_growth': resource_growth.run_resource_growth,
    'long_time': long_time.run_long_time,
}
