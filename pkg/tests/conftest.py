import random

import pytest

from simll.bench import Gate, GateType, Netlist
from simll.benchmarks import bundled

C17_TEXT = """\
# c17
INPUT(1)
INPUT(2)
INPUT(3)
INPUT(6)
INPUT(7)

OUTPUT(22)
OUTPUT(23)

10 = NAND(1, 3)
11 = NAND(3, 6)
16 = NAND(2, 11)
19 = NAND(11, 7)
22 = NAND(10, 16)
23 = NAND(16, 19)
"""


@pytest.fixture(scope="session")
def c17():
    return bundled("c17")


@pytest.fixture(scope="session")
def gen432():
    return bundled("gen432")


@pytest.fixture(scope="session")
def gen499():
    return bundled("gen499")


@pytest.fixture(scope="session")
def gen880():
    return bundled("gen880")


_TWO_IN = (
    GateType.AND,
    GateType.NAND,
    GateType.OR,
    GateType.NOR,
    GateType.XOR,
    GateType.XNOR,
)


def random_netlist(seed: int, allow_mux: bool = False) -> Netlist:
    """Small random feed-forward circuit; every gate output is read or a PO."""
    rng = random.Random(seed)
    inputs = tuple(f"i{j}" for j in range(rng.randint(3, 6)))
    nets = list(inputs)
    gates = []
    for gi in range(rng.randint(4, 18)):
        name = f"g{gi}"
        roll = rng.random()
        if roll < 0.15:
            kind = rng.choice((GateType.NOT, GateType.BUF))
            ins = (rng.choice(nets),)
        elif allow_mux and roll < 0.3 and len(nets) >= 3:
            kind = GateType.MUX
            ins = tuple(rng.sample(nets, 3))
        else:
            kind = rng.choice(_TWO_IN)
            ins = tuple(rng.sample(nets, min(len(nets), rng.randint(2, 3))))
        gates.append(Gate(name, kind, ins))
        nets.append(name)
    read = {src for g in gates for src in g.inputs}
    outputs = tuple(g.output for g in gates if g.output not in read)
    return Netlist(
        name=f"rnd{seed}",
        inputs=inputs,
        key_inputs=(),
        outputs=outputs,
        gates=tuple(gates),
    )
