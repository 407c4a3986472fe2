"""Exception hierarchy shared by all planner components."""


class PushSortError(Exception):
    """Base class for all errors raised by this package."""


class InvalidPolygonError(PushSortError, ValueError):
    """Polygon is not strictly convex, counter-clockwise, or has repeated vertices."""


class InvalidDirectionError(PushSortError, ValueError):
    pass


class InvalidStateError(PushSortError, ValueError):
    """Scene violates a structural invariant (overlap, labels, radii)."""


class InfeasibleTaskError(PushSortError):
    """Capacities cannot absorb every object of some category."""


class UnreachableError(PushSortError):
    """A reachability query was made on a point outside the reachable set."""


class InvalidActionError(PushSortError):
    """Action rejected by the simulator (e.g. placement overlaps an object)."""


class SimulationDivergenceError(PushSortError):
    """Contact projection did not converge within the iteration budget."""


class DensityError(PushSortError):
    """Scenario generator could not place all objects without overlap."""
