// Wire types of the lab server.  Field names follow the server exactly;
// the d3 document field names are fixed by the interchange format.
export {};
