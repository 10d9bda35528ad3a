"""
Logging and monitoring
"""
