"""Crop label constants used across the corpus, protocol and evaluation."""

TEAM_A = "TeamA"
TEAM_B = "TeamB"
REFEREE = "Referee"
FALSE_POSITIVE = "FalsePositive"

ALL_LABELS = (TEAM_A, TEAM_B, REFEREE, FALSE_POSITIVE)
TEAM_LABELS = (TEAM_A, TEAM_B)
