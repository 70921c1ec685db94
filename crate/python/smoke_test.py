"""Quick check that the mrlife_py extension loads and agrees with known values.

Build first:  pip install --no-build-isolation -e crates/python
"""

import json
import math
import pathlib
import tempfile

import mrlife_py as m


def close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(b))


def main():
    # Gamma(2, 1): m(1) = 1.5
    assert close(m.parametric_mrl("gamma", [2.0, 1.0], 1.0), 1.5, 1e-12)
    f, s, h = m.eval_core("gamma", [2.0, 1.0], 1.0)
    assert close(s, 2.0 * math.exp(-1.0), 1e-12) and close(h, f / s, 1e-12)

    c = m.catalog("exp_weibull", [0.5, 3.0, 1.0], 0.01, 20.0, 100)
    assert c["shape"] == "BT", c["shape"]
    assert len(c["t"]) == 100

    lin = m.catalog("linear_mrl", [0.5, 2.0], 0.1, 10.0, 20)
    assert all(close(v, 0.5 * t + 2.0, 1e-12) for t, v in zip(lin["t"], lin["mrl"]))

    times, censored = m.simulate("sim1", 3)
    assert len(times) == 200 and not any(censored)

    assert m.truncation_level(1.0, 1e-6)[0] == 20

    e = m.elicit(20.0, 40.0, 0.6, 0.025)
    assert e["b_prime"] > 0 and len(e["a_mu"]) == 2

    try:
        m.parametric_mrl("gamma", [-1.0, 1.0], 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("negative shape accepted")

    with tempfile.TemporaryDirectory() as tmp:
        cfg = pathlib.Path(tmp) / "run.json"
        cfg.write_text(json.dumps({
            "data": {"kind": "preset", "name": "sim2", "seed": 4},
            "sampler": {"truncation": 10, "burn_in": 50, "pilot_iters": 20, "n_save": 20},
            "grid": {"n": 20},
            "output_dir": "out",
        }))
        out = pathlib.Path(m.run(str(cfg)))
        rows = (out / "sim2" / "dpmm" / "mrl.csv").read_text().splitlines()
        assert rows[0].startswith("t,median,lower,upper") and len(rows) == 21

    print("smoke test passed")


if __name__ == "__main__":
    main()
