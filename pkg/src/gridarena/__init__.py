"""gridarena: round-robin learning-agent tournaments run as grid match-jobs.

An experiment names its agents and a game; the platform decomposes it into
one autonomous job per match, schedules those jobs across a modeled grid
(virtual-clock simulation or real thread-pool execution), stages agent
artifacts between rounds, recovers from failures by resubmission, and
exposes the whole lifecycle through a CLI, an HTTP service and a web
dashboard.
"""

__version__ = "0.1.0"
