# YAML parser
#
# The parser converts the experiment YAML into ast data classes.
#
# Defaults and value checks are applied by the separate resolution step
# in config.py.

import dataclasses

import logging
import yaml
from typing import Any, Dict, Optional, TextIO, Type, TypeVar, Union
from yaml.composer import Composer
from yaml.constructor import ConstructorError, SafeConstructor
from yaml.parser import Parser
from yaml.reader import Reader
from yaml.resolver import Resolver as BaseResolver
from yaml.scanner import Scanner

from . import ast
from .ast import Pos
from .types import LocalPath


log = logging.getLogger(__name__)


class ConfigError(ValueError):
    def __init__(self, msg: str, key: Optional[str], pos: Optional[Pos]) -> None:
        super().__init__(msg)
        self.key = key
        self.pos = pos

    @staticmethod
    def format_pos(pos: Pos) -> str:
        # For humans, line and columns are enumerated from 1, so we should add 1 here.
        return f'"{pos.filename}", line {pos.line + 1}, column {pos.col + 1}'

    def __str__(self) -> str:
        ret = str(self.args[0])
        if self.pos is not None:
            ret += f"\n  in {self.format_pos(self.pos)}"
        return ret


class BaseConstructor(SafeConstructor):
    pass


def mark2pos(mark: yaml.Mark) -> Pos:
    return Pos(mark.line, mark.column, LocalPath(mark.name))


_AstType = TypeVar("_AstType", bound=ast.Base)


def section_keys(res_type: Type[ast.Base]) -> Dict[str, Any]:
    return {
        f.name: f.type
        for f in dataclasses.fields(res_type)
        if f.name not in ("_start", "_end")
    }


def parse_dict(
    ctor: BaseConstructor,
    node: yaml.Node,
    keys: Dict[str, Optional[Type[ast.Base]]],
    res_type: Type[_AstType],
    *,
    ret_name: Optional[str] = None,
) -> _AstType:
    if ret_name is None:
        ret_name = res_type.__name__.lower()
    if not isinstance(node, yaml.MappingNode):
        node_id = node.id
        raise ConstructorError(
            None,
            None,
            f"expected a mapping node, but found '{node_id}'",
            node.start_mark,
        )
    node_start = mark2pos(node.start_mark)
    node_end = mark2pos(node.end_mark)

    data: Dict[str, Any] = {}
    for k, v in node.value:
        key = ctor.construct_object(k)  # type: ignore[no-untyped-call]
        if key not in keys:
            raise ConstructorError(
                f"while constructing '{ret_name}'",
                node.start_mark,
                f"unexpected key '{key}'",
                k.start_mark,
            )
        if key in data:
            raise ConstructorError(
                f"while constructing '{ret_name}'",
                node.start_mark,
                f"duplicate key '{key}'",
                k.start_mark,
            )
        item_ctor = keys[key]
        value: Any
        if item_ctor is None:
            tmp = ctor.construct_object(v, deep=True)  # type: ignore[no-untyped-call]
            value = ast.Value(mark2pos(v.start_mark), mark2pos(v.end_mark), tmp)
        else:
            # Sections are tagged by the path resolvers below
            value = ctor.construct_object(v, deep=True)  # type: ignore[no-untyped-call]
            if not isinstance(value, item_ctor):
                raise ConstructorError(
                    f"while constructing '{ret_name}'",
                    node.start_mark,
                    f"section '{key}' must be a mapping",
                    v.start_mark,
                )
        data[key] = value
    return res_type(_start=node_start, _end=node_end, **data)


def _value_keys(res_type: Type[ast.Base]) -> Dict[str, Optional[Type[ast.Base]]]:
    return {name: None for name in section_keys(res_type)}


class ExperimentLoader(
    Reader, Scanner, Parser, Composer, BaseConstructor, BaseResolver
):
    def __init__(self, stream: Union[str, TextIO]) -> None:
        Reader.__init__(self, stream)
        Scanner.__init__(self)
        Parser.__init__(self)
        Composer.__init__(self)
        BaseConstructor.__init__(self)
        BaseResolver.__init__(self)


SECTIONS: Dict[str, Type[ast.Section]] = {
    "units": ast.Units,
    "grid": ast.Grid,
    "initial": ast.Initial,
    "potential": ast.Potential,
    "evolution": ast.Evolution,
    "trajectories": ast.Trajectories,
    "diagnostics": ast.Diagnostics,
    "assertions": ast.Assertions,
    "interference": ast.Interference,
    "propagator": ast.Propagator,
    "output": ast.Output,
}


def _section_parser(name: str, res_type: Type[ast.Section]) -> Any:
    def parse(ctor: BaseConstructor, node: yaml.MappingNode) -> ast.Section:
        return parse_dict(ctor, node, _value_keys(res_type), res_type, ret_name=name)

    return parse


for _name, _type in SECTIONS.items():
    ExperimentLoader.add_path_resolver(  # type: ignore
        f"bohm:{_name}", [(dict, _name)], dict
    )
    ExperimentLoader.add_constructor(  # type: ignore
        f"bohm:{_name}", _section_parser(_name, _type)
    )


def parse_main(ctor: BaseConstructor, node: yaml.MappingNode) -> ast.Experiment:
    return parse_dict(
        ctor,
        node,
        {name: res_type for name, res_type in SECTIONS.items()},
        ast.Experiment,
        ret_name="experiment",
    )


ExperimentLoader.add_path_resolver("bohm:main", [], dict)  # type: ignore
ExperimentLoader.add_constructor("bohm:main", parse_main)  # type: ignore


def parse_experiment_stream(stream: Union[str, TextIO]) -> ast.Experiment:
    loader = ExperimentLoader(stream)
    try:
        ret = loader.get_single_data()
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark or exc.context_mark
        pos = mark2pos(mark) if mark is not None else None
        key = _unexpected_key(exc.problem)
        raise ConfigError(f"{exc.context or ''} {exc.problem}".strip(), key, pos)
    except yaml.YAMLError as exc:
        raise ConfigError(str(exc), None, None)
    finally:
        loader.dispose()  # type: ignore[no-untyped-call]
    if not isinstance(ret, ast.Experiment):
        raise ConfigError("experiment config must be a mapping of sections", None, None)
    return ret


def _unexpected_key(problem: Optional[str]) -> Optional[str]:
    if problem and "key '" in problem:
        return problem.split("'")[1]
    return None


def parse_experiment(config_file: LocalPath) -> ast.Experiment:
    with config_file.open() as f:
        return parse_experiment_stream(f)
