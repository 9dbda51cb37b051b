# symmetric loopless edge
signature E/2
universe 0 1
rel E = (0,1) (1,0)
