"""
Author: Louis Goodnews
Date: 2025-09-15
"""

from pathlib import Path
from typing import Any, Final, Optional, Sequence, Union


__all__: Final[list[str]] = [
    "CalibrationError",
    "DegenerateBispectrumError",
    "DilationMRAError",
    "GridError",
    "InsufficientPointsError",
    "InvalidEtaError",
    "InvalidParameterError",
    "LatentOutOfWindowError",
    "NonConvergenceError",
    "SearchFailureError",
    "SerializationError",
    "ZeroReferenceError",
]


class DilationMRAError(Exception):
    """
    Base exception class for every error raised by dilationmra.
    """


class GridError(DilationMRAError):
    """
    Raised when a sampling grid cannot be built from the requested parameters.
    """

    def __init__(
        self,
        N: int,
        ell: int,
        reason: str,
    ) -> None:
        """
        Initialize the exception with the rejected grid parameters.

        Args:
            N (int): The requested spatial extent.
            ell (int): The requested dyadic sampling exponent.
            reason (str): Why the parameters were rejected.

        Returns:
            None
        """

        self.N: int = N
        self.ell: int = ell

        super().__init__(f"Cannot build grid with N={N}, ell={ell}: {reason}")


class CalibrationError(DilationMRAError):
    """
    Raised when a signal carries too little energy on the grid to be normalized.
    """

    def __init__(
        self,
        signal_id: str,
        energy: float,
    ) -> None:
        """
        Initialize the exception with the signal and its measured energy.

        Args:
            signal_id (str): The signal that failed calibration.
            energy (float): The uncalibrated energy measured on the grid.

        Returns:
            None
        """

        self.signal_id: str = signal_id
        self.energy: float = energy

        super().__init__(
            f"Signal {signal_id} has energy {energy:.3e} on the grid, too small to calibrate"
        )


class LatentOutOfWindowError(DilationMRAError):
    """
    Raised when a translation/dilation pair moves the signal support outside the window.
    """

    def __init__(
        self,
        t: float,
        tau: float,
        half_window: float,
    ) -> None:
        """
        Initialize the exception with the offending latent draw.

        Args:
            t (float): The translation.
            tau (float): The dilation parameter.
            half_window (float): Half the length of the observation window.

        Returns:
            None
        """

        self.t: float = t
        self.tau: float = tau

        super().__init__(
            f"Latent (t={t:.6g}, tau={tau:.6g}) pushes the signal support outside "
            f"[-{half_window:g}, {half_window:g}]"
        )


class InvalidEtaError(DilationMRAError):
    """
    Raised when a dilation scale is outside the admissible range of a solver.
    """

    def __init__(
        self,
        eta: float,
        reason: str,
    ) -> None:
        """
        Initialize the exception with the rejected dilation scale.

        Args:
            eta (float): The rejected dilation scale.
            reason (str): Why the value was rejected.

        Returns:
            None
        """

        self.eta: float = eta

        super().__init__(f"Invalid dilation scale eta={eta!r}: {reason}")


class InvalidParameterError(DilationMRAError, ValueError):
    """
    Raised when a model parameter other than the dilation scale is out of range.
    """

    def __init__(
        self,
        name: str,
        value: Any,
        reason: str,
    ) -> None:
        """
        Initialize the exception with the rejected parameter.

        Args:
            name (str): The parameter name.
            value (Any): The rejected value.
            reason (str): Why the value was rejected.

        Returns:
            None
        """

        self.name: str = name
        self.value: Any = value

        super().__init__(f"Invalid {name}={value!r}: {reason}")


class NonConvergenceError(DilationMRAError):
    """
    Raised when an iterative solver stops without meeting its tolerance.
    """

    def __init__(
        self,
        solver: str,
        iterations: int,
        residual: float,
        result: Optional[Any] = None,
    ) -> None:
        """
        Initialize the exception with the solver diagnostics.

        Args:
            solver (str): The name of the solver.
            iterations (int): The number of iterations performed.
            residual (float): The final residual.
            result (Optional[Any]): The last iterate, for callers that want to fall back on it.

        Returns:
            None
        """

        self.solver: str = solver
        self.iterations: int = iterations
        self.residual: float = residual
        self.result: Optional[Any] = result

        super().__init__(
            f"{solver} did not converge after {iterations} iterations "
            f"(final residual {residual:.3e})"
        )


class SearchFailureError(DilationMRAError):
    """
    Raised when the dilation-scale search finds a profile that is not unimodal.
    """

    def __init__(
        self,
        profile: Sequence[tuple[float, float]],
    ) -> None:
        """
        Initialize the exception with the evaluated loss profile.

        Args:
            profile (Sequence[tuple[float, float]]): The (eta, loss) pairs evaluated so far.

        Returns:
            None
        """

        self.profile: list[tuple[float, float]] = list(profile)

        # Render the profile compactly so it shows up in logs
        rendered: str = ", ".join(f"({eta:.4g}, {loss:.4g})" for eta, loss in profile)

        super().__init__(f"Eta loss profile is not unimodal: {rendered}")


class DegenerateBispectrumError(DilationMRAError):
    """
    Raised when the bispectrum carries no usable phase information.
    """

    def __init__(
        self,
        reason: str,
    ) -> None:
        """
        Initialize the exception with a description of the degeneracy.

        Args:
            reason (str): What made the bispectrum unusable.

        Returns:
            None
        """

        super().__init__(f"Degenerate bispectrum: {reason}")


class ZeroReferenceError(DilationMRAError):
    """
    Raised when a relative error is requested against a reference of zero norm.
    """

    def __init__(self) -> None:
        """
        Initialize the exception.

        Returns:
            None
        """

        super().__init__("Reference signal has zero L2 norm")


class InsufficientPointsError(DilationMRAError):
    """
    Raised when a slope fit has fewer distinct sample sizes than it needs.
    """

    def __init__(
        self,
        found: int,
        required: int,
    ) -> None:
        """
        Initialize the exception with the number of distinct points.

        Args:
            found (int): The number of distinct sample sizes available.
            required (int): The number of distinct sample sizes required.

        Returns:
            None
        """

        self.found: int = found
        self.required: int = required

        super().__init__(
            f"Slope fit needs {required} distinct sample sizes, found {found}"
        )


class SerializationError(DilationMRAError):
    """
    Raised when reading or writing one of the package's file formats fails.
    """

    def __init__(
        self,
        path: Union[str, Path],
        reason: str,
    ) -> None:
        """
        Initialize the exception with the path and the failure reason.

        Args:
            path (Union[str, Path]): The file involved.
            reason (str): What went wrong.

        Returns:
            None
        """

        self.path: Path = Path(path)

        super().__init__(f"{self.path}: {reason}")
