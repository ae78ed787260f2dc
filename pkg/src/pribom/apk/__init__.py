"""Binary container and bytecode decoders."""

from .archive import ApkArchive, open_apk  # noqa: F401
from .arsc import ResourceTable, compose_resource_id, parse_resource_table, resolve_resource_id  # noqa: F401
from .axml import BinaryXmlDocument, decode_binary_xml  # noqa: F401
from .dex import DexModel, merge_models, parse_dex  # noqa: F401
