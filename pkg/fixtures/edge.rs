# a single directed edge
signature R/2
universe 0 1
rel R = (0,1)
