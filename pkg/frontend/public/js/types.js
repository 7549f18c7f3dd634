// Wire types for the nlstplan HTTP JSON API (see the service's JSON schema).
export {};
