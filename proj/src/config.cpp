// config parsing: implemented with the runner
