// Document shapes mirroring the service's JSON schema (docs/schema.md).
export {};
