"""Reference values frozen from independent computations.

Each value was produced with mpmath at 30 significant digits (root
polishing with ``findroot``/``polyroots`` and direct evaluation of the
closed-form eigenvalue expression), never with herdlab code.
``test_oracles.py`` recomputes them.
"""

# spiral pursuit, R=2, k=1, k1=1, kappa=1
SPIRAL_W2 = dict(r_star=0.44579299263891327706, R_star=1.1490553536410453527,
                 psi_star=1.1723739543638449066)
SPIRAL_W5 = dict(r_star=0.24342568889264374246, R_star=0.93854250788769562806,
                 psi_star=1.3084310076120973784)
KAPPA_BOUND_K1_1_R2 = 1.0397207708399179641

# circular pursuit, R=2, k=1
CIRCULAR_W1 = dict(r_s1=1.8608058531117033864, r_s2=0.25410168836505241213,
                   r_s3=-2.1149075414767557985, psi_s2=1.4434011682858011094)
CIRCULAR_W2 = dict(r_s1=1.9342978757660600777, r_s2=0.12549409433526068921,
                   r_s3=-2.059791970101320767, psi_s2=1.5080080319774957423)
EIG_W1_S2 = complex(-0.06404442493341955311, 0.98136884233937664322)
EIG_W1_S1 = (2.4046854670522008308, -4.9430359969134360412)
