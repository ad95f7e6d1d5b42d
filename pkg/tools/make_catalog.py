"""Regenerate the shipped scenario catalog under src/pairinglab/data/scenarios.

Run from the repository root:  python3 tools/make_catalog.py
"""

import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parents[1] / "src" / "pairinglab" \
    / "data" / "scenarios"

BUMP18 = {"kind": "bump1d", "a": -1.8, "b": 1.8}
DOM = [-2.0, 2.0]
RECT = [[-2.0, 2.0], [-2.0, 2.0]]

U_SMOOTH = {"kind": "bv1d", "domain": DOM,
            "ac": {"type": "sinusoid", "offset": 0.5, "amplitude": 0.4,
                   "frequency": 2.0}}
U_JUMP = {"kind": "bv1d", "domain": DOM,
          "ac": {"type": "constant", "value": 0.2},
          "jumps": [[0.3, 0.2, 1.2]]}
U_JUMPNEG = {"kind": "bv1d", "domain": DOM,
             "ac": {"type": "constant", "value": 0.2},
             "jumps": [[-0.8, 0.2, 1.2]]}
U_JUMP2 = {"kind": "bv1d", "domain": DOM,
           "ac": {"type": "constant", "value": 0.0},
           "jumps": [[1.0, 0.0, 2.0]]}
U_STAIR = {"kind": "bv1d", "domain": DOM,
           "ac": {"type": "constant", "value": 0.0},
           "jumps": [[-0.5, 0.0, 1.0], [0.7, 1.0, 2.5]]}
U_CANTOR = {"kind": "bv1d", "domain": DOM,
            "cantor": {"interval": [0.0, 1.0], "scale": 1.0}}
U_MIXED = {"kind": "bv1d", "domain": DOM,
           "ac": {"type": "ramp", "x0": 0.0, "x1": 1.0, "lo": 0.0, "hi": 0.8},
           "jumps": [[1.3, 1.3, 2.1]],
           "cantor": {"interval": [-1.5, -0.5], "scale": 0.5}}
U_RAMP = {"kind": "bv1d", "domain": DOM,
          "ac": {"type": "ramp", "x0": 0.0, "x1": 1.0, "lo": 0.0, "hi": 1.0}}
U_DISC = {"kind": "bv2d", "rect": RECT, "shape": "disc",
          "center": [0.0, 0.0], "radius": 1.0, "value": 1.0}
U_SQUARE = {"kind": "bv2d", "rect": RECT, "shape": "square",
            "half_width": 0.8, "value": 1.5}
U_SMOOTH2D = {"kind": "bv2d", "rect": RECT, "shape": "smooth_radial",
              "amplitude": 1.2, "support_radius": 1.0}

PHI_RAD = {"kind": "radial2d", "r_plateau": 1.2, "r_out": 1.9}
PHI_ANN = {"kind": "radial2d", "r_plateau": 1.5, "r_out": 1.9,
           "r_in0": 0.15, "r_in1": 0.35}
PHI_BOX = {"kind": "box2d", "xr": [-1.8, 1.8], "yr": [-1.8, 1.8],
           "margin": 0.6}


def chk(name, tol, **params):
    c = {"name": name, "tolerance": tol}
    if params:
        c["params"] = params
    return c


def core(traces=True):
    out = [chk("two_route", 1e-6), chk("chain_rule", 1e-8),
           chk("coarea_pairing", 1e-6), chk("coarea_variation", 1e-5),
           chk("mass_bound", 1e-9), chk("lipschitz", 1e-8),
           chk("order_relations", 1e-9)]
    if traces:
        out.insert(1, chk("traces_route", 1e-6))
    return out


def scenario(sid, field_kind, bv, phi, extra=(), window=None):
    return {"id": sid, "field": {"kind": field_kind}, "bv": bv, "phi": phi,
            "window": window if window is not None else (
                DOM if bv["kind"] == "bv1d" else None),
            "checks": core() + list(extra)}


CATALOG = [
    scenario("s01_smooth_const", "const", U_SMOOTH, BUMP18,
             [chk("cyl_average", 1e-7), chk("approximation", 1e-6)]),
    scenario("s02_smooth_xt", "xt", U_SMOOTH, BUMP18,
             [chk("approximation", 1e-6), chk("sigma_k", 1e-6)]),
    scenario("s03_jump_const", "const", U_JUMP, BUMP18,
             [chk("continuity", 1e-5, sequence="mollified", mode="L1"),
              chk("lsc", 1e-6, functional="F", sequence="mollified",
                  mode="L1"),
              chk("relaxation", 1e-4)]),
    scenario("s04_jump_gt", "gt", U_JUMP, BUMP18,
             [chk("relaxation", 1e-4), chk("blowup", 1e-3, point="jump"),
              chk("lsc", 1e-6, functional="F", sequence="mollified",
                  mode="L1")]),
    scenario("s05_jump2_xt", "xt", U_JUMP2,
             {"kind": "plateau1d", "a": 0.2, "p": 0.8, "q": 1.4, "b": 1.8}),
    scenario("s06_stair_xt", "xt", U_STAIR, BUMP18,
             [chk("continuity", 1e-5, sequence="mollified", mode="weak*",
                  count=10),
              chk("lsc", 1e-6, functional="F", sequence="mollified",
                  mode="weak*"),
              chk("sigma_k", 1e-6, g_invariance=True),
              chk("relaxation", 1e-4)]),
    scenario("s07_stair_sep", "sep", U_STAIR, BUMP18),
    scenario("s08_cantor_const", "const", U_CANTOR,
             {"kind": "plateau1d", "a": -0.8, "p": -0.3, "q": 1.3, "b": 1.8},
             [chk("relaxation", 1e-4), chk("blowup", 1e-3, point="cantor"),
              chk("lsc", 1e-6, functional="F", sequence="mollified",
                  mode="L1")]),
    scenario("s09_cantor_gt", "gt", U_CANTOR, BUMP18),
    scenario("s10_mixed_sep", "sep", U_MIXED, BUMP18),
    scenario("s11_mixed_tanh", "tanh", U_MIXED, BUMP18,
             [chk("relaxation", 1e-4, mode="L1loc"),
              chk("continuity", 1e-5, sequence="mollified", mode="L1loc"),
              chk("lsc", 1e-6, functional="G+", sequence="mollified",
                  mode="L1loc", count=12)]),
    scenario("s12_smooth_sep", "sep", U_SMOOTH, BUMP18,
             [chk("lsc", 1e-6, functional="F", sequence="oscillation",
                  mode="L1")]),
    scenario("s13_jumpneg_sep", "sep", U_JUMPNEG, BUMP18,
             [chk("lsc", 1e-6, functional="G+", sequence="mollified",
                  mode="L1")]),
    scenario("s14_ramp_xt", "xt", U_RAMP, BUMP18,
             [chk("relaxation", 1e-4)]),
    scenario("s15_disc_linear2d", "linear2d", U_DISC, PHI_RAD,
             [chk("gauss_green", 1e-5)]),
    scenario("s16_disc_const2d", "const2d", U_DISC, PHI_RAD),
    scenario("s17_disc_gt2d", "gt2d", U_DISC, PHI_RAD),
    scenario("s18_disc_radial2d", "radial2d", U_DISC, PHI_ANN,
             [chk("cyl_average", 1e-7), chk("approximation", 1e-4),
              chk("relaxation", 1e-4, mode="L1loc")]),
    scenario("s19_square_linear2d", "linear2d", U_SQUARE, PHI_BOX),
    scenario("s20_smoothdisc_linear2d", "linear2d", U_SMOOTH2D, PHI_RAD,
             [chk("approximation", 1e-6)]),
    scenario("s21_smoothdisc_gt2d", "gt2d", U_SMOOTH2D, PHI_RAD),
]


def main():
    OUT.mkdir(parents=True, exist_ok=True)
    for old in OUT.glob("*.json"):
        old.unlink()
    for sc in CATALOG:
        path = OUT / f"{sc['id']}.json"
        path.write_text(json.dumps(sc, indent=2) + "\n")
    print(f"wrote {len(CATALOG)} scenarios to {OUT}")


if __name__ == "__main__":
    main()
