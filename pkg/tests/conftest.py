# Makes the tests directory importable so shared oracle helpers can be reused.
