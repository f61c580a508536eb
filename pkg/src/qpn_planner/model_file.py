"""
Line-oriented model files.

    var NAME : chance|decision|value [literals TRUE_LABEL FALSE_LABEL]
    influence SRC -> DST : SIGN [| VAR=LITERAL, VAR=LITERAL ...]
    inform SRC -> DST
    depend A -- B

`#` starts a comment. An influence line may repeat for the same pair; each
line adds one entry.
"""

import re
from typing import Dict, List, Tuple

from qpn_planner.errors import ModelSyntaxError
from qpn_planner.network import (
    Condition,
    Network,
    QualitativeInfluence,
    Sign,
    Variable,
    VariableKind,
)

_VAR = re.compile(r"^var\s+(\w+)\s*:\s*(\w+)(?:\s+literals\s+(\S+)\s+(\S+))?$")
_INFLUENCE = re.compile(r"^influence\s+(\w+)\s*->\s*(\w+)\s*:\s*(\S)\s*(?:\|\s*(.+))?$")
_INFORM = re.compile(r"^inform\s+(\w+)\s*->\s*(\w+)$")
_DEPEND = re.compile(r"^depend\s+(\w+)\s*--\s*(\w+)$")

TEST_TREAT = """\
# Test/treat decision: test for a disease, then decide on treatment.
var d : chance
var r : chance
var c : chance
var y : chance
var z : chance
var t : decision
var x : decision
var u : value

influence d -> r : + | t=T
influence d -> r : 0 | t=~T
influence t -> z : +
influence x -> c : +
influence x -> y : +
influence d -> u : -
influence c -> u : + | d=D
influence c -> u : 0 | d=~D
influence y -> u : -
influence z -> u : -

inform t -> x
inform r -> x
depend d -- t
"""


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def parse(text: str) -> Network:
    """Parse a model file into a canonical, not yet validated, network."""
    lines = [(n, _strip(raw)) for n, raw in enumerate(text.splitlines(), start=1)]
    variables: Dict[str, Variable] = {}
    for lineno, line in lines:
        if not line.startswith("var"):
            continue
        m = _VAR.match(line)
        if m is None:
            raise ModelSyntaxError(f"malformed variable declaration '{line}'", lineno)
        name, kind, true_label, false_label = m.groups()
        try:
            var_kind = VariableKind(kind)
        except ValueError:
            raise ModelSyntaxError(f"unknown variable kind '{kind}'", lineno) from None
        literals = (true_label, false_label) if true_label else ("", "")
        if name in variables:
            raise ModelSyntaxError(f"variable '{name}' declared twice", lineno)
        variables[name] = Variable(name, var_kind, literals)

    entries: Dict[Tuple[str, str], List[Tuple[Condition, Sign]]] = {}
    informational = []
    dependences = []
    for lineno, line in lines:
        if not line or line.startswith("var"):
            continue
        if line.startswith("influence"):
            m = _INFLUENCE.match(line)
            if m is None:
                raise ModelSyntaxError(f"malformed influence '{line}'", lineno)
            src, dst, sign_text, condition_text = m.groups()
            try:
                sign = Sign.parse(sign_text)
            except ValueError as e:
                raise ModelSyntaxError(str(e), lineno) from None
            condition = _parse_condition(condition_text, variables, lineno)
            entries.setdefault((src, dst), []).append((condition, sign))
        elif line.startswith("inform"):
            m = _INFORM.match(line)
            if m is None:
                raise ModelSyntaxError(f"malformed informational link '{line}'", lineno)
            informational.append((m.group(1), m.group(2)))
        elif line.startswith("depend"):
            m = _DEPEND.match(line)
            if m is None:
                raise ModelSyntaxError(f"malformed dependence '{line}'", lineno)
            dependences.append((m.group(1), m.group(2)))
        else:
            raise ModelSyntaxError(f"unrecognised statement '{line}'", lineno)

    influences = tuple(
        QualitativeInfluence(src, dst, tuple(found)) for (src, dst), found in entries.items()
    )
    return Network(
        variables=tuple(variables.values()),
        influences=influences,
        informational=tuple(informational),
        dependences=tuple(dependences),
    ).canonical()


def _parse_condition(text: str | None, variables: Dict[str, Variable], lineno: int) -> Condition:
    if not text:
        return Condition()
    literals = []
    for item in text.split(","):
        name, sep, label = item.strip().partition("=")
        name, label = name.strip(), label.strip()
        if not sep or not name or not label:
            raise ModelSyntaxError(f"malformed condition literal '{item.strip()}'", lineno)
        if name not in variables:
            raise ModelSyntaxError(f"condition names undeclared variable '{name}'", lineno)
        try:
            literals.append((name, variables[name].parse(label)))
        except ValueError as e:
            raise ModelSyntaxError(str(e), lineno) from None
    names = [n for n, _ in literals]
    if len(set(names)) != len(names):
        raise ModelSyntaxError("variable repeated in a condition", lineno)
    return Condition.of(literals)


def serialize(net: Network) -> str:
    """Canonical text for a network; parsing it gives back an equal network."""
    net = net.canonical()
    lines = []
    for v in net.variables:
        line = f"var {v.id} : {v.kind.value}"
        if v.literals != Variable(v.id, v.kind).literals:
            line += f" literals {v.literals[0]} {v.literals[1]}"
        lines.append(line)
    for inf in net.influences:
        for cond, sign in inf.entries:
            line = f"influence {inf.source} -> {inf.target} : {sign}"
            if not cond.is_true:
                literals = ", ".join(
                    f"{var}={net.literal(var, value)}" for var, value in cond.literals
                )
                line += f" | {literals}"
            lines.append(line)
    lines.extend(f"inform {src} -> {dst}" for src, dst in net.informational)
    lines.extend(f"depend {a} -- {b}" for a, b in net.dependences)
    return "\n".join(lines) + "\n"


_SHAPES = {
    VariableKind.CHANCE: "ellipse",
    VariableKind.DECISION: "box",
    VariableKind.VALUE: "hexagon",
}


def to_dot(net: Network, name: str = "network") -> str:
    lines = [f"digraph {name} {{"]
    for v in net.variables:
        lines.append(f'  {v.id} [shape={_SHAPES[v.kind]}, label="{v.id}"];')
    for inf in net.influences:
        label = ", ".join(
            str(sign) if cond.is_true else f"{sign}|{cond.render(net)}"
            for cond, sign in inf.entries
        )
        lines.append(f'  {inf.source} -> {inf.target} [label="{label}"];')
    for src, dst in net.informational:
        lines.append(f"  {src} -> {dst} [style=dashed];")
    for a, b in net.dependences:
        lines.append(f"  {a} -> {b} [dir=none, style=dotted];")
    lines.append("}")
    return "\n".join(lines) + "\n"
