// Document shapes mirroring the service's JSON schema (docs/schema.md).

export interface WidgetIdentifier {
  widget_type: string;
  widget_id: number;
  widget_name: string | null;
  widget_src: string[];
}

export interface EventBinding {
  event: string;
  handler: string;
  origin: string;
}

export interface PermissionFinding {
  permission: string;
  data_type: string;
  method_path: string;
  min_api_level: number;
}

export interface TplRecord {
  name: string;
  version: string;
  latest_version: string | null;
  publish_date_current: string | null;
  publish_date_latest: string | null;
  confidence: number;
}

export interface PolicySegment {
  data_type: string;
  text: string;
  paragraph_index: number;
  sentence_index: number;
  evidence: string[];
}

export interface LabelDeclaration {
  label_name: string;
  data_type: string;
  optional_flag: boolean;
  purposes: string[];
}

export interface WidgetEntry {
  identifier: WidgetIdentifier;
  bindings: EventBinding[];
  findings: PermissionFinding[];
  widget_min_api: number;
  tpls: TplRecord[];
  policy_segments: PolicySegment[];
  label_declarations: LabelDeclaration[];
}

export interface PribomDocument {
  schema_version: number;
  app_package: string;
  app_version_name: string;
  app_version_code: number;
  generated_at: string;
  tool_version: string;
  data_type_catalog: string[];
  entries: WidgetEntry[];
}

export interface DocumentResponse {
  revision: number;
  document: PribomDocument;
}

export interface TracePayload {
  widget_id: number;
  entry: WidgetEntry;
  notes: string[];
}

export interface TrackPayload {
  selector: { type: string; value: string };
  widget_ids: number[];
  widgets: { widget_id: number; widget_name: string | null; widget_type: string }[];
  policy_segments: { widget_id: number; data_type: string; text: string }[];
  label_declarations: { widget_id: number; data_type: string; label_name: string }[];
}

export interface ChannelReport {
  channel: string;
  undisclosed: { data_type: string; widget_ids: number[] }[];
  over_disclosed: string[];
}

export interface CheckReport {
  undisclosed: { data_type: string; widget_ids: number[] }[];
  channels: { policy: ChannelReport; label: ChannelReport };
  exit_status: number;
}

export type TrackType = "permission" | "data_type" | "tpl" | "policy";

// A staged disclosure edit: only these fields are writable over HTTP.
export interface DisclosureEdit {
  widget_name?: string;
  policy_segments?: PolicySegment[];
  label_declarations?: LabelDeclaration[];
}
