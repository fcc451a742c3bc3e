"""Physical constants and the internal scaled unit system.

The simulator works in a coherent scaled unit system chosen so that MNA
matrix entries stay near unity at the operating points of interest:

    voltage      mV
    current      uA
    resistance   kOhm   (mV/uA)
    time         ps
    capacitance  fF     (kOhm*fF = ps)
    inductance   nH     (nH/kOhm = ps)
    charge       aC     (uA*ps = aC)
    energy       zJ     (mV*aC = zJ)

Netlist values are parsed in base SI units and converted on elaboration.
"""

# Cooper-pair charge 2e and the magnetic flux quantum, SI.
TWO_E_SI = 3.204353e-19  # C
PHI0_SI = 2.067834e-15  # Wb

# Same constants in scaled units.
TWO_E = 0.3204353  # aC
PHI0 = 2.067834  # mV*ps

# SI -> scaled multipliers.
VOLT = 1e3  # V -> mV
AMP = 1e6  # A -> uA
OHM = 1e-3  # ohm -> kohm
SECOND = 1e12  # s -> ps
FARAD = 1e15  # F -> fF
HENRY = 1e9  # H -> nH
COULOMB = 1e18  # C -> aC
JOULE = 1e21  # J -> zJ
