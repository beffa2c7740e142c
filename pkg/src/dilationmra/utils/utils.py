"""
Author: Louis Goodnews
Date: 2025-09-15
"""

import csv
import sys

from datetime import timedelta
from pathlib import Path
from typing import Any, Final, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from numpy.typing import NDArray

from ..core.exceptions import SerializationError
from ..core.signal_model import Grid, ObservationBatch, Signal, SignalModelUtils
from ..core.spectra import BispectrumField, SpectraUtils

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


__all__: Final[list[str]] = [
    "DataConversionUtils",
    "FileUtils",
]


class DataConversionUtils:
    """
    A collection of utility functions for converting values to and from CSV cells.
    """

    @classmethod
    def float_to_str(
        cls,
        value: Optional[float],
    ) -> str:
        """
        Convert a float to its shortest round-trip string.

        Args:
            value (Optional[float]): The float to convert.

        Returns:
            str: repr(value), or an empty string for None.
        """

        # Check if the value is missing
        if value is None:
            return ""

        return repr(float(value))

    @classmethod
    def str_to_float(
        cls,
        value: str,
    ) -> Optional[float]:
        """
        Convert a string to a float.

        Args:
            value (str): The string to convert.

        Returns:
            Optional[float]: The float, or None if the string is empty or not a number.
        """

        # Check if the value is a non-empty string
        if value is None or not isinstance(
            value,
            str,
        ):
            return None

        try:
            return float(value)
        except ValueError:
            return None

    @classmethod
    def timedelta_to_str(
        cls,
        value: timedelta,
    ) -> str:
        """
        Convert a timedelta to an ISO 8601 duration.

        Args:
            value (timedelta): The timedelta to convert.

        Returns:
            str: The duration, e.g. "PT1.5S".
        """

        from isodate import duration_isoformat

        return duration_isoformat(value)

    @classmethod
    def seconds_to_str(
        cls,
        value: float,
    ) -> str:
        """Convert a number of seconds to an ISO 8601 duration."""

        return cls.timedelta_to_str(value=timedelta(seconds=value))

    @classmethod
    def str_to_timedelta(
        cls,
        value: str,
    ) -> Optional[timedelta]:
        """
        Convert an ISO 8601 duration to a timedelta.

        Args:
            value (str): The string to convert.

        Returns:
            Optional[timedelta]: The timedelta, or None if the string is not a duration.
        """

        # Check if the value is a string
        if value is None or not isinstance(
            value,
            str,
        ):
            return None

        from isodate import ISO8601Error, parse_duration

        try:
            return parse_duration(value)
        except (ISO8601Error, ValueError):
            return None


class FileUtils:
    """
    A collection of utility functions for reading and writing the CSV formats.
    """

    @classmethod
    def sidecar_path(
        cls,
        path: Union[str, Path],
    ) -> Path:
        """The key/value header file stored next to a CSV file."""

        return Path(path).with_suffix(".toml")

    @classmethod
    def write_csv(
        cls,
        path: Union[str, Path],
        header: Sequence[str],
        rows: Iterable[Sequence[Any]],
    ) -> Path:
        """
        Write a CSV file with a fixed header.

        Args:
            path (Union[str, Path]): The destination.
            header (Sequence[str]): The column names.
            rows (Iterable[Sequence[Any]]): The rows, already converted to strings where needed.

        Returns:
            Path: The written path.

        Raises:
            SerializationError: If the file cannot be written.
        """

        path = Path(path)

        try:
            path.parent.mkdir(parents=True, exist_ok=True)

            with path.open("w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle, lineterminator="\n")

                writer.writerow(header)
                writer.writerows(rows)
        except OSError as error:
            raise SerializationError(path=path, reason=str(error)) from error

        return path

    @classmethod
    def read_csv(
        cls,
        path: Union[str, Path],
        header: Optional[Sequence[str]] = None,
    ) -> tuple[list[str], list[list[str]]]:
        """
        Read a CSV file, optionally checking its header.

        Args:
            path (Union[str, Path]): The source.
            header (Optional[Sequence[str]]): The expected column names.

        Returns:
            tuple[list[str], list[list[str]]]: The header and the rows.

        Raises:
            SerializationError: If the file cannot be read or the header differs.
        """

        path = Path(path)

        try:
            with path.open("r", newline="", encoding="utf-8") as handle:
                rows: list[list[str]] = list(csv.reader(handle))
        except OSError as error:
            raise SerializationError(path=path, reason=str(error)) from error

        if not rows:
            raise SerializationError(path=path, reason="file is empty")

        # Check if the header matches the expected columns
        if header is not None and rows[0] != list(header):
            raise SerializationError(
                path=path,
                reason=f"expected header {','.join(header)}, found {','.join(rows[0])}",
            )

        return rows[0], rows[1:]

    @classmethod
    def write_sidecar(
        cls,
        path: Union[str, Path],
        values: Mapping[str, Union[int, float, str]],
    ) -> Path:
        """
        Write flat key = value pairs readable as TOML.

        Args:
            path (Union[str, Path]): The CSV file the header belongs to.
            values (Mapping[str, Union[int, float, str]]): The entries.

        Returns:
            Path: The written sidecar path.
        """

        sidecar: Path = cls.sidecar_path(path=path)

        lines: list[str] = []

        for key, value in values.items():
            if isinstance(value, str):
                lines.append(f'{key} = "{value}"')
            elif isinstance(value, bool):
                lines.append(f"{key} = {str(value).lower()}")
            elif isinstance(value, int):
                lines.append(f"{key} = {value}")
            else:
                lines.append(f"{key} = {float(value)!r}")

        try:
            sidecar.parent.mkdir(parents=True, exist_ok=True)
            sidecar.write_text("\n".join(lines) + "\n", encoding="utf-8")
        except OSError as error:
            raise SerializationError(path=sidecar, reason=str(error)) from error

        return sidecar

    @classmethod
    def read_toml(
        cls,
        path: Union[str, Path],
    ) -> dict[str, Any]:
        """
        Read a TOML file.

        Args:
            path (Union[str, Path]): The source.

        Returns:
            dict[str, Any]: The parsed document.

        Raises:
            SerializationError: If the file is missing or not valid TOML.
        """

        path = Path(path)

        try:
            with path.open("rb") as handle:
                return tomllib.load(handle)
        except OSError as error:
            raise SerializationError(path=path, reason=str(error)) from error
        except tomllib.TOMLDecodeError as error:
            raise SerializationError(path=path, reason=f"invalid TOML: {error}") from error

    @classmethod
    def read_grid(
        cls,
        path: Union[str, Path],
    ) -> Grid:
        """
        Rebuild the grid recorded in a CSV file's sidecar header.

        Args:
            path (Union[str, Path]): The CSV file.

        Returns:
            Grid: The grid.
        """

        header: dict[str, Any] = cls.read_toml(path=cls.sidecar_path(path=path))

        try:
            return SignalModelUtils.make_grid(N=int(header["N"]), ell=int(header["ell"]))
        except KeyError as error:
            raise SerializationError(
                path=cls.sidecar_path(path=path),
                reason=f"missing key {error.args[0]!r}",
            ) from error

    @classmethod
    def _parse_floats(
        cls,
        path: Path,
        cells: Sequence[str],
    ) -> list[float]:
        values: list[Optional[float]] = [
            DataConversionUtils.str_to_float(value=cell) for cell in cells
        ]

        if any(value is None for value in values):
            raise SerializationError(path=path, reason=f"non-numeric row {','.join(cells)}")

        return values  # type: ignore[return-value]

    @classmethod
    def write_bispectrum(
        cls,
        field: BispectrumField,
        path: Union[str, Path],
        **header: Union[int, float, str],
    ) -> Path:
        """
        Write a bispectrum as omega1,omega2,re,im rows over its mask.

        Args:
            field (BispectrumField): The bispectrum.
            path (Union[str, Path]): The destination.
            **header: Extra sidecar entries besides N and ell.

        Returns:
            Path: The written CSV path.
        """

        grid: Grid = field.grid

        (
            rows,
            cols,
        ) = np.nonzero(field.mask)

        to_str = DataConversionUtils.float_to_str

        cls.write_sidecar(path=path, values={"N": grid.N, "ell": grid.ell, **header})

        return cls.write_csv(
            path=path,
            header=("omega1", "omega2", "re", "im"),
            rows=(
                (
                    to_str(value=grid.omega[i]),
                    to_str(value=grid.omega[j]),
                    to_str(value=field.values[i, j].real),
                    to_str(value=field.values[i, j].imag),
                )
                for i, j in zip(rows, cols)
            ),
        )

    @classmethod
    def read_bispectrum(
        cls,
        path: Union[str, Path],
    ) -> BispectrumField:
        """
        Read a bispectrum written by write_bispectrum.

        Args:
            path (Union[str, Path]): The CSV file.

        Returns:
            BispectrumField: The bispectrum, masked to the rows present.
        """

        path = Path(path)
        grid: Grid = cls.read_grid(path=path)

        (
            _,
            rows,
        ) = cls.read_csv(path=path, header=("omega1", "omega2", "re", "im"))

        values: NDArray[np.complex128] = np.zeros((grid.n_omega, grid.n_omega), dtype=np.complex128)
        mask: NDArray[np.bool_] = np.zeros((grid.n_omega, grid.n_omega), dtype=bool)

        for cells in rows:
            (
                w1,
                w2,
                re,
                im,
            ) = cls._parse_floats(path=path, cells=cells)

            i: int = int(round(w1 / grid.d_omega)) + grid.center
            j: int = int(round(w2 / grid.d_omega)) + grid.center

            values[i, j] = complex(re, im)
            mask[i, j] = True

        if np.any(mask & ~SpectraUtils.validity_mask(grid=grid)):
            raise SerializationError(path=path, reason="entries outside the validity mask")

        return BispectrumField(values=values, grid=grid, mask=mask)

    @classmethod
    def write_vector(
        cls,
        path: Union[str, Path],
        grid: Grid,
        columns: tuple[str, str],
        values: NDArray[np.float64],
        **header: Union[int, float, str],
    ) -> Path:
        """
        Write a real vector sampled on Grid.x or Grid.omega as two columns.

        Args:
            path (Union[str, Path]): The destination.
            grid (Grid): The grid.
            columns (tuple[str, str]): ("x", "value") for signals, ("omega", "power") for spectra.
            values (NDArray[np.float64]): The samples.
            **header: Extra sidecar entries besides N and ell.

        Returns:
            Path: The written CSV path.
        """

        axis: NDArray[np.float64] = grid.x if columns[0] == "x" else grid.omega

        to_str = DataConversionUtils.float_to_str

        cls.write_sidecar(path=path, values={"N": grid.N, "ell": grid.ell, **header})

        return cls.write_csv(
            path=path,
            header=columns,
            rows=((to_str(value=a), to_str(value=v)) for a, v in zip(axis, values)),
        )

    @classmethod
    def read_vector(
        cls,
        path: Union[str, Path],
        columns: tuple[str, str],
    ) -> tuple[Grid, NDArray[np.float64]]:
        """
        Read a vector written by write_vector.

        Args:
            path (Union[str, Path]): The CSV file.
            columns (tuple[str, str]): The expected header.

        Returns:
            tuple[Grid, NDArray[np.float64]]: The grid and the samples.
        """

        path = Path(path)
        grid: Grid = cls.read_grid(path=path)

        (
            _,
            rows,
        ) = cls.read_csv(path=path, header=columns)

        values: NDArray[np.float64] = np.array(
            [cls._parse_floats(path=path, cells=cells)[1] for cells in rows]
        )

        expected: int = grid.n_x if columns[0] == "x" else grid.n_omega

        if values.size != expected:
            raise SerializationError(
                path=path, reason=f"expected {expected} rows, found {values.size}"
            )

        return grid, values

    @classmethod
    def write_signal(
        cls,
        signal: Signal,
        path: Union[str, Path],
        **header: Union[int, float, str],
    ) -> Path:
        """Write a signal as x,value rows."""

        return cls.write_vector(
            path=path,
            grid=signal.grid,
            columns=("x", "value"),
            values=signal.values,
            **header,
        )

    @classmethod
    def read_signal(
        cls,
        path: Union[str, Path],
    ) -> Signal:
        """Read a signal written by write_signal."""

        (
            grid,
            values,
        ) = cls.read_vector(path=path, columns=("x", "value"))

        return Signal(values=values, grid=grid)

    @classmethod
    def write_observations(
        cls,
        batch: ObservationBatch,
        path: Union[str, Path],
        **header: Union[int, float, str],
    ) -> Path:
        """
        Write observations one per row: index, t, tau, then the samples y0..yn.

        Args:
            batch (ObservationBatch): The observations.
            path (Union[str, Path]): The destination.
            **header: Extra sidecar entries besides N and ell.

        Returns:
            Path: The written CSV path.
        """

        grid: Grid = batch.grid

        to_str = DataConversionUtils.float_to_str

        cls.write_sidecar(path=path, values={"N": grid.N, "ell": grid.ell, **header})

        return cls.write_csv(
            path=path,
            header=("index", "t", "tau", *(f"y{j}" for j in range(grid.n_x))),
            rows=(
                (
                    str(batch.start + row),
                    to_str(value=batch.t[row]),
                    to_str(value=batch.tau[row]),
                    *(to_str(value=v) for v in batch.values[row]),
                )
                for row in range(batch.size)
            ),
        )

    @classmethod
    def read_observations(
        cls,
        path: Union[str, Path],
    ) -> ObservationBatch:
        """
        Read observations written by write_observations.

        Args:
            path (Union[str, Path]): The CSV file.

        Returns:
            ObservationBatch: The observations and their latents.
        """

        path = Path(path)
        grid: Grid = cls.read_grid(path=path)

        (
            _,
            rows,
        ) = cls.read_csv(
            path=path,
            header=("index", "t", "tau", *(f"y{j}" for j in range(grid.n_x))),
        )

        if not rows:
            raise SerializationError(path=path, reason="no observations")

        table: NDArray[np.float64] = np.array(
            [cls._parse_floats(path=path, cells=cells) for cells in rows]
        )

        return ObservationBatch(
            values=table[:, 3:],
            t=table[:, 1],
            tau=table[:, 2],
            grid=grid,
            start=int(table[0, 0]),
        )

    @classmethod
    def write_profile(
        cls,
        profile: Sequence[tuple[float, float]],
        path: Union[str, Path],
    ) -> Path:
        """Write an eta loss profile as eta_candidate,loss rows."""

        to_str = DataConversionUtils.float_to_str

        return cls.write_csv(
            path=path,
            header=("eta_candidate", "loss"),
            rows=((to_str(value=eta), to_str(value=loss)) for eta, loss in profile),
        )
