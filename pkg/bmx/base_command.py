import argparse
import inspect
import types
from abc import ABC, abstractmethod
from collections.abc import Callable
from enum import Enum
from pathlib import Path
from typing import Annotated, Any, Union, get_args, get_origin

from bmx.config import Settings
from bmx.models import CommandResult

# parameters the runner supplies instead of the command line
INJECTED = ("self", "settings")

ArgumentSpec = tuple[list[str], dict[str, Any]]


def parse_complex(text: str) -> complex:
    """Accept ``1+2j``, ``1+2i`` or a bare real number."""
    try:
        return complex(text.strip().replace(" ", "").replace("i", "j"))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"invalid complex value: '{text}'") from exc


def _unwrap_optional(tp: Any) -> tuple[Any, bool]:
    if get_origin(tp) is Union or isinstance(tp, types.UnionType):
        args = [arg for arg in get_args(tp) if arg is not type(None)]
        if len(args) == 1:
            return args[0], True
    return tp, False


def _argument_kwargs(tp: Any) -> dict[str, Any]:
    """argparse keyword arguments for one annotated type."""
    tp, _ = _unwrap_optional(tp)
    if get_origin(tp) is list:
        item = get_args(tp)[0] if get_args(tp) else str
        return {"nargs": "+", **_argument_kwargs(item)}
    if tp is bool:
        return {"action": "store_true"}
    if isinstance(tp, type) and issubclass(tp, Enum):
        values = [e.value for e in tp]
        return {
            "type": tp,
            "choices": list(tp),
            "metavar": "{" + ",".join(str(v) for v in values) + "}",
        }
    if tp is complex:
        return {"type": parse_complex}
    if tp in (int, float, str, Path):
        return {"type": tp}
    return {"type": str}


def _split_annotation(ann: Any) -> tuple[Any, str | None]:
    """The bare type of ``ann`` and the first help string attached to it."""
    if get_origin(ann) is not Annotated:
        return ann, None
    base, *extras = get_args(ann)
    return base, next((extra for extra in extras if isinstance(extra, str)), None)


def get_cli_schema_from_fn(fn: Callable[..., Any]) -> list[ArgumentSpec]:
    """Derive argparse arguments from a function signature.

    Parameters without defaults become positionals; the rest become
    ``--dashed-name`` options carrying their default.
    """
    specs = []
    for name, param in inspect.signature(fn).parameters.items():
        if name in INJECTED:
            continue
        tp, help_text = _split_annotation(param.annotation)
        kwargs = _argument_kwargs(tp)
        if help_text:
            kwargs["help"] = help_text
        if param.default is inspect.Parameter.empty:
            specs.append(([name], kwargs))
            continue
        if kwargs.get("action") != "store_true":
            kwargs["default"] = param.default
        kwargs["dest"] = name
        specs.append(([f"--{name.replace('_', '-')}"], kwargs))
    return specs


def enforce_execute_type_annotations(fn: Callable[..., Any]) -> None:
    signature = inspect.signature(fn)
    unannotated = [
        name
        for name, param in signature.parameters.items()
        if name != "self" and param.annotation is inspect.Parameter.empty
    ]
    if unannotated:
        raise TypeError(
            f"{fn.__qualname__}: parameters must have type annotations. "
            f"Missing: {unannotated}"
        )
    if signature.return_annotation is inspect.Signature.empty:
        raise TypeError(f"{fn.__qualname__} must have a return type annotation")


class Command(ABC):
    """A ``bmx`` subcommand whose arguments are read off ``execute``."""

    name: str | None = None
    description: str | None = None

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)
        if "execute" in cls.__dict__:
            enforce_execute_type_annotations(cls.execute)

    def __init__(self, name: str | None = None, description: str | None = None):
        self.name = name or type(self).name
        self.description = description or type(self).description
        if not (self.name and self.description):
            raise ValueError(
                f"{type(self).__name__} must have 'name' and 'description', as "
                "class attributes or constructor arguments"
            )
        self.arguments = get_cli_schema_from_fn(self.execute)

    def add_parser(
        self, subparsers, parents: list[argparse.ArgumentParser]
    ) -> argparse.ArgumentParser:
        parser = subparsers.add_parser(
            self.name,
            help=self.description,
            description=self.description,
            parents=parents,
        )
        for flags, kwargs in self.arguments:
            parser.add_argument(*flags, **kwargs)
        return parser

    @abstractmethod
    def execute(self, settings: Settings, **kwargs: Any) -> CommandResult:
        """Run the command; ``kwargs`` are the parsed command-line arguments."""
