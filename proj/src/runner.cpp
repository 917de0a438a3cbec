// runner pipeline
