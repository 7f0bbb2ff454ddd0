"""Ground congruence closure over the prover's tuple terms.

Tracks the ground unit consequences discovered during saturation: positive
equations merge term classes (with congruence propagation through
applications), negative equations are watched disequalities, and ground
predicate atoms are asserted by merging an atom node with a polarity node.
A contradiction among these units refutes the clause set immediately.

Every union is logged so the prover can materialize derived equations as
unit clauses; on a merge the closure also emits equations between same-head
members of the two classes (their arguments are congruent, and lifted
clauses usually need exactly that same-head shape), plus ground atoms that
became true or false through congruence.
"""

from __future__ import annotations

TRUE = ("$true",)
FALSE = ("$false",)

# emitted entries: ("eq", a, b) | ("atom", sign, pred, args)
Emission = tuple


class CongruenceClosure:
    def __init__(self) -> None:
        self.parent: dict[tuple, tuple] = {}
        self.uses: dict[tuple, list[tuple]] = {}  # rep -> application terms using it
        self.signatures: dict[tuple, tuple] = {}
        self.members: dict[tuple, list[tuple]] = {}  # rep -> class members
        self.diseqs: list[tuple[tuple, tuple]] = []
        self.contradiction = False
        self.emissions: list[Emission] = []
        self.register(TRUE)
        self.register(FALSE)

    # -- union-find -----------------------------------------------------------

    def find(self, t: tuple) -> tuple:
        root = t
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[t] != root:
            self.parent[t], t = root, self.parent[t]
        return root

    def register(self, t: tuple) -> None:
        if t in self.parent:
            return
        self.parent[t] = t
        self.uses[t] = []
        self.members[t] = [t]
        for a in t[1:]:
            self.register(a)
            self.uses[self.find(a)].append(t)
        if len(t) > 1:
            self._resign(t)

    def _signature(self, t: tuple) -> tuple:
        return (t[0], *(self.find(a) for a in t[1:]))

    def _resign(self, t: tuple) -> None:
        sig = self._signature(t)
        other = self.signatures.get(sig)
        if other is None:
            self.signatures[sig] = t
        elif self.find(other) != self.find(t):
            self._union(other, t)

    # -- merging ----------------------------------------------------------------

    def merge(self, a: tuple, b: tuple) -> None:
        self.register(a)
        self.register(b)
        self._union(a, b)
        self._check_diseqs()

    def _union(self, a: tuple, b: tuple) -> None:
        queue = [(a, b)]
        while queue:
            x, y = queue.pop()
            rx, ry = self.find(x), self.find(y)
            if rx == ry:
                continue
            if rx in (TRUE, FALSE):
                rx, ry = ry, rx  # keep polarity nodes as representatives
            if ry in (TRUE, FALSE) and rx in (TRUE, FALSE):
                self.contradiction = True
                return
            self._emit_pairs(rx, ry)
            self.parent[rx] = ry
            moved_members = self.members.pop(rx, [])
            self.members.setdefault(ry, []).extend(moved_members)
            moved = self.uses.pop(rx, [])
            self.uses.setdefault(ry, []).extend(moved)
            for app in moved:
                sig = self._signature(app)
                other = self.signatures.get(sig)
                if other is None:
                    self.signatures[sig] = app
                elif self.find(other) != self.find(app):
                    queue.append((other, app))

    def _emit_pairs(self, rx: tuple, ry: tuple) -> None:
        lhs = self.members.get(rx, [])
        rhs = self.members.get(ry, [])
        if ry in (TRUE, FALSE):
            # atoms joining a polarity class become ground facts
            sign = ry == TRUE
            for m in lhs:
                if m[0].startswith("@"):
                    self.emissions.append(("atom", sign, m[0][1:], m[1:]))
            return
        emitted = 0
        for a in lhs:
            if a[0].startswith("@"):
                continue
            for b in rhs:
                if b[0].startswith("@"):
                    continue
                self.emissions.append(("eq", a, b))
                emitted += 1
                if emitted >= 256:  # degenerate huge classes: cap the fan
                    return

    def _check_diseqs(self) -> None:
        for x, y in self.diseqs:
            if self.find(x) == self.find(y):
                self.contradiction = True
                return

    # -- assertions ---------------------------------------------------------------

    def assert_eq(self, a: tuple, b: tuple) -> None:
        self.merge(a, b)

    def assert_diseq(self, a: tuple, b: tuple) -> None:
        self.register(a)
        self.register(b)
        if self.find(a) == self.find(b):
            self.contradiction = True
        self.diseqs.append((a, b))

    def assert_atom(self, sign: bool, pred: str, args: tuple) -> None:
        node = ("@" + pred, *args)
        self.merge(node, TRUE if sign else FALSE)

    # -- queries ---------------------------------------------------------------------

    def eq_holds(self, a: tuple, b: tuple) -> bool:
        self.register(a)
        self.register(b)
        return self.find(a) == self.find(b)

    def atom_value(self, pred: str, args: tuple) -> bool | None:
        node = ("@" + pred, *args)
        self.register(node)
        rep = self.find(node)
        if rep == self.find(TRUE):
            return True
        if rep == self.find(FALSE):
            return False
        return None
