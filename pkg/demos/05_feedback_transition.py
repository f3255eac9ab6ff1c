"""The measurement-plus-feedback loop softens the spin mode at a critical
gain; the kernel exponent s tunes how the fluctuations diverge."""

from latticeqed.feedback import (FeedbackResponse, SpinLightModel,
                                 critical_gain, quadrature_variance_integral)

model = SpinLightModel()
for s in (1.0, 5.0, 20.0):
    resp = FeedbackResponse("power-law", h0=s, t0=1.0, exponent=s)
    gcrit = critical_gain(model, resp)
    var = [quadrature_variance_integral(model, resp, f * gcrit)
           for f in (0.9, 0.99)]
    print(f"s = {s:>4}: G_crit = {gcrit:8.3f},  <X^2> at 0.9/0.99 G_crit = "
          f"{var[0]:9.3f} / {var[1]:9.3f}")
