bounds_help = """
Print the separability bounds of a test function.

The test function is F(z) = exp(-C z) (1 + D_1 z + D_2 z^2 + ...). For every
Fock index n the table lists O_n; a separable state always satisfies

    min_n O_n <= <F(O_EPR)> <= max_n O_n

The extrema are certified against the analytic tail of the O_n sequence, and
n_max is doubled until the certification succeeds.

Example:
    eprwit bounds --C 1.2 --D -0.5
"""


witness_help = """
Evaluate a functional EPR witness on a state.

The state is given either with --state (family:key=value,...) or through the
"state" section of --config. Without --samples the expectation is computed
exactly from the joint (x1, p2) distribution, and the standard error is the
one N repetitions would give. With --samples the witness is evaluated on
recorded x1,p2[,o_epr] rows, and --draw writes N freshly sampled rows.

The report is JSON: estimate, bounds and the verdict (violation, significance
and whether entanglement is certified at 3 standard errors).

Example:
    eprwit witness --state cat:nu=0.5,p=0.3 --C 1.0 --D -0.8 --N 100000
"""


baseline_help = """
Run a covariance-matrix entanglement criterion on a state.

    simon   partial-transpose test, exact for Gaussian states
    duan    sum of EPR variances below (g^2 + 1/g^2)/2

Example:
    eprwit baseline --criterion simon --state tmss:s=0.3,op=add
"""


teleport_help = """
Teleportation fidelity through a Braunstein-Kimble channel.

Channels:
    tmss:s=<squeezing>     two-mode squeezed vacuum resource
    pm:m=<index>           channel whose EPR quadratures follow p_m
    state                  the state given by --state / the config

Inputs:
    vacuum, coherent:beta=<amplitude> (or b=), fock:n=<photons>

The JSON report holds the fidelity, E1 = <O_EPR> and the lower bound 1 - E1.
"""


sweep_help = """
Produce the data table behind one of the witness figures.

    1b  violation vs. cat size nu and loss eta (p = 0.3)
    1c  sampled violation and its standard error vs. nu under detection noise
    1d  significance of exp(-Cz) and exp(-Cz)(1 + Dz) vs. c0
    2a  detection time vs. c0 (n_th = 0.5)
    2b  detection time vs. squeezing for photon-subtracted TMSS (n_th = 0.05),
        next to Simon on the energy-matched TMSS

Axes and resolution come from the "sweep", "measure" and "optimize" sections
of --config. The table is written as CSV.
"""


detect_time_help = """
Largest decoherence time t = log(1/eta) at which a criterion still detects
entanglement under the thermal attenuator with occupation --nth.

Criteria: ours (optimised functional witness), simon, duan.
"""
