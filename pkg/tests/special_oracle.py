"""Reference values computed with mpmath at 50 significant digits (tools/gen_special_oracle.py)."""

LGAMMA = [
    (1e-08, 18.42068073818021),
    (0.1, 2.252712651734206),
    (0.5, 0.5723649429247001),
    (0.876, 0.08505569244822644),
    (1.0, 0.0),
    (1.5, -0.12078223763524522),
    (2.0, 0.0),
    (2.5, 0.2846828704729192),
    (3.7, 1.428072326665388),
    (10.0, 12.801827480081469),
    (33.3, 82.60372358165495),
    (171.5, 709.1431630309282),
    (10000.0, 82099.71749644238),
    (100000000.0, 1742068066.1038346),
    (1.4616321449683622, -0.12148629053584961),
]
DIGAMMA = [
    (1e-06, -1000000.5772140201),
    (0.25, -4.2274535333762655),
    (0.5, -1.9635100260214235),
    (0.847, -0.8615747239871804),
    (1.0, -0.5772156649015329),
    (1.4616321449683622, -9.241265521729427e-17),
    (2.0, 0.42278433509846713),
    (3.3, 1.0348224890596216),
    (9.99, 2.250700372831201),
    (10.0, 2.251752589066721),
    (150.0, 5.007298257075679),
    (1000000.0, 13.815510057964191),
]
# (a, x, P(a, x), Q(a, x))
GAMMA_INC = [
    (0.5, 0.1, 0.345279153981423, 0.654720846018577),
    (0.5, 2.0, 0.9544997361036416, 0.04550026389635842),
    (0.876, 0.3, 0.3186844995351711, 0.6813155004648289),
    (0.876, 5.0, 0.9950362269943901, 0.004963773005609957),
    (1.0, 1.0, 0.6321205588285577, 0.36787944117144233),
    (1.0, 30.0, 0.9999999999999064, 9.357622968840175e-14),
    (2.0, 0.01, 4.966791334026589e-05, 0.9999503320866597),
    (2.5, 2.5, 0.5841198130044921, 0.41588018699550794),
    (3.0, 4.0, 0.7618966944464557, 0.23810330555354434),
    (5.5, 1.0, 0.0015041182825838038, 0.9984958817174162),
    (10.0, 9.0, 0.4125917556680586, 0.5874082443319414),
    (10.0, 20.0, 0.9950045876916924, 0.004995412308307587),
    (30.0, 25.0, 0.18210391597745512, 0.8178960840225449),
    (50.0, 60.0, 0.9155933189063081, 0.08440668109369183),
    (100.0, 90.0, 0.15822098918643016, 0.8417790108135699),
    (250.0, 260.0, 0.7406105173923527, 0.25938948260764727),
    (0.3, 0.001, 0.14024245892486736, 0.8597575410751326),
    (0.01, 0.5, 0.9943732438060329, 0.0056267561939671844),
    (7.0, 7.0, 0.5502889441513011, 0.44971105584869886),
    (1000.0, 1010.0, 0.6276789447369947, 0.3723210552630053),
    (12.0, 3.0, 7.13866289742066e-05, 0.9999286133710258),
    (4.0, 40.0, 0.9999999999999512, 4.888864465181051e-14),
    (0.2, 8.0, 0.9999873041508042, 1.2695849195863918e-05),
]
