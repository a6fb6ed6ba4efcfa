import os
from typing import Any

from dotenv import find_dotenv, load_dotenv
from exceptions import BadInputError


class EnvironmentVariableGetter:
    @staticmethod
    def get(name_of_variable: str, default_value: Any = None) -> bool | str:
        """
        Gets the value of an environment variable.

        Variables from a `.env` file are loaded first, variables from a `.env.override` file take precedence over them.
        The strings "true" and "false" (in any casing) are converted to booleans, every other value is returned as is.

        Args:
            name_of_variable: The name of the environment variable to query.
            default_value: The fallback value to return if the environment variable is not set or empty.

        Returns:
            bool | str: The value of the environment variable.

        Raises:
            RuntimeError: If the variable is not set and no default value is provided.
        """
        load_dotenv(override=True)
        load_dotenv(dotenv_path=find_dotenv(".env.override"), override=True)

        value = os.environ.get(name_of_variable, "")
        if value != "":
            return EnvironmentVariableGetter._cast_string_to_bool(value)

        if default_value is not None:
            return default_value

        raise RuntimeError(f'The environment variable "{name_of_variable}" is not set!')

    @staticmethod
    def get_int(name_of_variable: str, default_value: int) -> int:
        """
        Gets an environment variable holding a non-negative integer, e.g. an enumeration budget.

        Args:
            name_of_variable: The name of the environment variable to query.
            default_value: The value used when the variable is unset.

        Returns:
            int: The parsed value.

        Raises:
            BadInputError: If the variable is set but is not a non-negative integer.
        """
        raw_value = EnvironmentVariableGetter.get(name_of_variable, default_value)
        try:
            value = int(raw_value)
        except (TypeError, ValueError):
            raise BadInputError(f'The environment variable "{name_of_variable}" must be an integer, got "{raw_value}"')
        if isinstance(raw_value, bool) or value < 0:
            raise BadInputError(f'The environment variable "{name_of_variable}" must be non-negative, got "{raw_value}"')
        return value

    @staticmethod
    def _cast_string_to_bool(value: str) -> bool | str:
        if value.lower() == "true":
            return True
        if value.lower() == "false":
            return False
        return value
