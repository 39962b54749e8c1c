"""Input fixtures and one invocation per CLI subcommand."""

from pathlib import Path

K3 = "3 3\n0 1\n0 2\n1 2\n"
TWO = "metric 2\na\nb\ndistances\na b 2/1\n"
GLUE = "metric 1\nc\ndistances\n"
SIDE1 = "metric 2\nc\np\ndistances\nc p 1/1\n"
SIDE2 = "metric 2\nc\nq\ndistances\nc q 2/1\n"
POINTED = "metric 2\ns\ne\ndistances\ns e 2/1\n"
BROKEN = "metric 3\na\nb\nc\ndistances\na b 1/1\na c 3/1\nb c 1/1\n"


def write_inputs(d: Path) -> dict[str, str]:
    files = {"k3": K3, "two": TWO, "glue": GLUE, "side1": SIDE1, "side2": SIDE2, "pointed": POINTED, "broken": BROKEN}
    out = {}
    for name, text in files.items():
        p = d / f"{name}.txt"
        p.write_text(text)
        out[name] = str(p)
    return out


def cases(f: dict[str, str], tower_file: str) -> dict[str, list[str]]:
    return {
        "graph rado": ["graph", "rado", "--n", "8", "--k", "2"],
        "graph rigidify": ["graph", "rigidify", "--base", "rado8", "--schedule", "2,3,4", "--steps", "4"],
        "graph tower": [
            "graph", "tower", "--base", "rado3", "--family", "2,3,4,5,6,7;2,4,5,6,7,8;3,4,5,6,7,8",
            "--layer-size", "5", "--layers", "3",
        ],
        "graph aut": ["graph", "aut", f["k3"], "--list"],
        "graph defects": ["graph", "defects", "rado1", "--k", "1"],
        "metric validate": ["metric", "validate", f["two"]],
        "metric extend": ["metric", "extend", f["two"], "--type", "a:1", "--id", "x"],
        "metric pushout": [
            "metric", "pushout", "--a", f["glue"], "--b1", f["side1"], "--b2", f["side2"], "--e1", "c:c", "--e2", "c:c",
        ],
        "metric qu": ["metric", "qu", f["two"], "--k", "2", "--menu", "1,2"],
        "metric rtype": ["metric", "rtype", f["pointed"], "--special", "s", "--r", "2", "--menu", "1,2,3"],
        "metric gadget": ["metric", "gadget", "--n", "2", "--L", "10"],
        "metric tower": ["metric", "tower", "--stages", "1", "--pairs", "2", "--fills", "2"],
        "metric audit": ["metric", "audit", tower_file],
    }
