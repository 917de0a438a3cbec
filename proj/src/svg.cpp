// svg output: implemented with the runner
