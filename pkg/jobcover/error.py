class JobCoverError(Exception):
    pass

class InstanceError(JobCoverError):
    pass

class CompletionError(JobCoverError):
    pass

class LPError(JobCoverError):
    pass

class ConvergenceError(LPError):
    pass

class RoundingError(JobCoverError):
    pass

class ScheduleError(JobCoverError):
    pass

class OracleGuardError(JobCoverError):
    pass

class SuiteError(JobCoverError):
    pass
