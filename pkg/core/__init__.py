"""
Core application package: exact-arithmetic services, the duomagma
management command and the Celery self-test suites.
"""
