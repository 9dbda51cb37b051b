# three overlapping looped edges, one per relation
signature R1/2 R2/2 R3/2
universe 0 1 2
rel R1 = (0,0) (0,1) (1,0)
rel R2 = (1,1) (1,2) (2,1)
rel R3 = (2,2) (2,0) (0,2)
