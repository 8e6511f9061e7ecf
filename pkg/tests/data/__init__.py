"""
Builders for the datasets, graphs and config files shared by the tests
"""
