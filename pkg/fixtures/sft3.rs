# three-element structure with two binary relations; dismantles c -> b -> a
signature R1/2 R2/2
universe a b c
rel R1 = (a,a) (a,b) (b,a) (b,b) (b,c) (c,b)
rel R2 = (a,a) (a,b) (b,a) (b,b) (b,c) (c,a)
