// report/cli io, filled in with the harness
