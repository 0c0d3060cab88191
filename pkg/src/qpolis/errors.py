"""Error type shared by every module.

Each failure carries a stable upper-case ``code`` (e.g. ``NOT_OPEN_MAP``) so the
CLI and the JSON reports can refer to it without parsing messages.
"""


class QpolisError(Exception):
    def __init__(self, code, message="", **details):
        self.code = code
        self.details = details
        super().__init__(f"{code}: {message}" if message else code)

    def to_json(self):
        out = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: _jsonable(v) for k, v in self.details.items()}
        return out


def _jsonable(value):
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = [_jsonable(v) for v in value]
        return sorted(items, key=repr) if isinstance(value, (set, frozenset)) else items
    return repr(value)
