"""A dispersively shifted cavity maps the atom-number distribution onto
its transmission spectrum: one Lorentzian per atom number, weighted by
the number statistics. A pinned state gives a single line, a delocalized
one a comb under a Gaussian envelope."""

import numpy as np

from latticeqed.scattering import (fit_gaussian_envelope,
                                   number_distribution_mi,
                                   number_distribution_sf,
                                   transmission_spectrum)

kappa, u11 = 0.1, 1.0

q, p = number_distribution_mi(15, 30)
res = transmission_spectrum(q, p, kappa, u11)
print("pinned state: peak at detuning",
      res.detuning[np.argmax(res.photon_number)])

q, p = number_distribution_sf(30, 15, 30)
res = transmission_spectrum(q, p, kappa, u11)
center, width = fit_gaussian_envelope(res.detuning, res.photon_number)
print(f"delocalized state: envelope center {center:.2f}, width {width:.3f}"
      f" (prediction {u11 * np.sqrt(15 * 0.5):.3f})")
